/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/service/service.cpp
 *
 * Copyright 2026 The sk13 Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "sk13/service/service.hpp"
#include "sk13/core/error.hpp"
#include "sk13/core/image_io.hpp"
#include "sk13/fitting/fitter.hpp"
#include "sk13/losses/landmarks.hpp"
#include "sk13/service/json_io.hpp"

#include "httplib.h"
#include "json.hpp"

#include <fstream>
#include <span>

namespace sk13 {
namespace service {

using nlohmann::json;

namespace {

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message)
{
    res.status = status;
    res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(), "application/json");
}

void send_json(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

std::string read_text(const std::filesystem::path& path)
{
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

std::span<const std::uint8_t> as_bytes(const std::string& s)
{
    return std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

std::string status_code_name(int status)
{
    switch (status)
    {
    case 400:
        return "bad_request";
    case 404:
        return "not_found";
    case 405:
        return "method_not_allowed";
    case 413:
        return "payload_too_large";
    default:
        return status >= 500 ? "internal_error" : "error";
    }
}

} // namespace

Service::Service(ServiceConfig config, model::HeadModelAsset asset)
    : config_(std::move(config)), asset_(std::move(asset)), store_(config_.store_dir),
      server_(std::make_unique<httplib::Server>())
{
    config_.validate();
    asset_.validate();
    install_routes();
}

Service::~Service()
{
    stop();
}

void Service::start()
{
    {
        std::lock_guard lock(queue_mutex_);
        if (!workers_.empty())
        {
            return;
        }
        stopping_ = false;
    }
    for (const Job& job : store_.load_all())
    {
        if (job.state == JobState::running)
        {
            store_.transition(job.id, JobState::failed, std::string("interrupted by a service restart"));
        }
        else if (job.state == JobState::queued)
        {
            std::lock_guard lock(queue_mutex_);
            queue_.push_back(job.id);
        }
    }
    std::lock_guard lock(queue_mutex_);
    for (int i = 0; i < config_.max_concurrent; ++i)
    {
        workers_.emplace_back([this] { worker_loop(); });
    }
}

bool Service::listen()
{
    return server_->listen(config_.host, config_.port);
}

int Service::bind_any_port()
{
    return server_->bind_to_any_port(config_.host);
}

bool Service::listen_after_bind()
{
    return server_->listen_after_bind();
}

void Service::stop()
{
    if (server_)
    {
        server_->stop();
    }
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(queue_mutex_);
        stopping_ = true;
        workers.swap(workers_);
    }
    queue_cv_.notify_all();
    for (std::thread& t : workers)
    {
        t.join();
    }
}

std::size_t Service::queued_count() const
{
    std::lock_guard lock(queue_mutex_);
    return queue_.size();
}

void Service::worker_loop()
{
    while (true)
    {
        std::string id;
        {
            std::unique_lock lock(queue_mutex_);
            queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (stopping_)
            {
                return;
            }
            id = queue_.front();
            queue_.pop_front();
        }
        run_job(id);
    }
}

void Service::run_job(const std::string& id)
{
    try
    {
        const Job job = store_.transition(id, JobState::running);
        const std::filesystem::path dir = store_.job_dir(id);
        const Image sketch = decode_png(read_file_bytes(dir / "sketch.png"));
        std::optional<losses::LandmarkSet> landmarks;
        if (job.request.has_landmarks)
        {
            landmarks = losses::read_landmarks_csv(dir / "landmarks.csv");
        }
        fitting::FitConfig cfg = config_.fit;
        apply_fit_overrides(cfg, job.request.config_overrides);
        cfg.use_landmarks = landmarks.has_value();

        const fitting::Reconstruction result = fitting::reconstruct(sketch, landmarks, asset_, cfg);
        model::write_obj(result.mesh, dir / "mesh.obj");
        model::save_params(result.params, dir / "params.sk13p");
        const json report = {{"coarse", to_json(result.coarse)},
                             {"detail", to_json(result.detail)},
                             {"config", to_json(cfg)},
                             {"vertex_count", result.mesh.vertex_count()}};
        std::ofstream(dir / "report.json") << report.dump(2) << '\n';
        store_.transition(id, JobState::done);
    }
    catch (const std::exception& e)
    {
        try
        {
            store_.transition(id, JobState::failed, std::string(e.what()));
        }
        catch (const std::exception&)
        {
            // The record itself is unreadable; nothing more to report it to.
        }
    }
}

void Service::install_routes()
{
    httplib::Server& srv = *server_;
    srv.set_payload_max_length(config_.max_upload_bytes + (1u << 20));
    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
        {
            send_error(res, res.status, status_code_name(res.status), httplib::status_message(res.status));
        }
    });
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "unexpected failure";
        try
        {
            std::rethrow_exception(ep);
        }
        catch (const std::exception& e)
        {
            message = e.what();
        }
        catch (...)
        {
        }
        send_error(res, 500, "internal_error", message);
    });

    srv.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    srv.Get("/api/v1/health", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}});
    });

    srv.Post("/api/v1/reconstruct", [this](const httplib::Request& req, httplib::Response& res) {
        if (!req.is_multipart_form_data())
        {
            send_error(res, 400, "invalid_request", "expected multipart/form-data");
            return;
        }
        if (!req.has_file("sketch"))
        {
            send_error(res, 400, "missing_sketch", "the sketch field is required");
            return;
        }
        const std::string sketch_png = req.get_file_value("sketch").content;
        if (sketch_png.size() > config_.max_upload_bytes)
        {
            send_error(res, 413, "image_too_large",
                       "sketch is " + std::to_string(sketch_png.size()) + " bytes, the limit is " +
                           std::to_string(config_.max_upload_bytes));
            return;
        }
        Image sketch;
        try
        {
            sketch = decode_png(as_bytes(sketch_png));
        }
        catch (const Error& e)
        {
            send_error(res, 400, "invalid_image", e.what());
            return;
        }
        if (sketch.width > config_.max_image_side || sketch.height > config_.max_image_side)
        {
            send_error(res, 413, "image_too_large",
                       "sketch is " + std::to_string(sketch.width) + "x" + std::to_string(sketch.height) +
                           ", the limit is " + std::to_string(config_.max_image_side) + " per side");
            return;
        }

        std::optional<std::string> landmarks_csv;
        if (req.has_file("landmarks"))
        {
            landmarks_csv = req.get_file_value("landmarks").content;
            try
            {
                losses::parse_landmarks_csv(*landmarks_csv);
            }
            catch (const Error& e)
            {
                send_error(res, 400, "invalid_landmarks", e.what());
                return;
            }
        }

        RequestSummary summary;
        summary.width = sketch.width;
        summary.height = sketch.height;
        summary.has_landmarks = landmarks_csv.has_value();
        if (req.has_file("config"))
        {
            try
            {
                const std::string& text = req.get_file_value("config").content;
                summary.config_overrides = text.empty() ? json::object() : json::parse(text);
                fitting::FitConfig check = config_.fit;
                apply_fit_overrides(check, summary.config_overrides);
            }
            catch (const json::exception& e)
            {
                send_error(res, 400, "invalid_config", std::string("config is not valid JSON: ") + e.what());
                return;
            }
            catch (const Error& e)
            {
                send_error(res, 400, "invalid_config", e.what());
                return;
            }
        }

        std::unique_lock lock(queue_mutex_);
        if (queue_.size() >= config_.max_queue)
        {
            lock.unlock();
            send_error(res, 429, "queue_full", "too many queued jobs, retry later");
            return;
        }
        const Job job = store_.create(sketch_png, landmarks_csv, summary);
        queue_.push_back(job.id);
        lock.unlock();
        queue_cv_.notify_one();
        send_json(res, 202, {{"job_id", job.id}, {"state", to_string(job.state)}});
    });

    const auto find_job = [this](const httplib::Request& req, httplib::Response& res) -> std::optional<Job> {
        const std::string id = req.matches[1];
        std::optional<Job> job = is_valid_job_id(id) ? store_.get(id) : std::nullopt;
        if (!job)
        {
            send_error(res, 404, "job_not_found", "no job with id '" + id + "'");
        }
        return job;
    };

    srv.Get(R"(/api/v1/jobs/([^/]+))", [find_job](const httplib::Request& req, httplib::Response& res) {
        if (const std::optional<Job> job = find_job(req, res))
        {
            send_json(res, 200, to_json(*job));
        }
    });

    const auto serve_result = [this, find_job](const char* what, const char* content_type) {
        return [this, find_job, what, content_type](const httplib::Request& req, httplib::Response& res) {
            const std::optional<Job> job = find_job(req, res);
            if (!job)
            {
                return;
            }
            if (job->state != JobState::done)
            {
                send_error(res, 409, "job_not_done",
                           std::string(what) + " is available once the job is done; state is " +
                               to_string(job->state));
                return;
            }
            const std::string file = std::string(what) == "mesh" ? *job->mesh_path : *job->report_path;
            res.status = 200;
            res.set_content(read_text(store_.job_dir(job->id) / file), content_type);
        };
    };
    srv.Get(R"(/api/v1/jobs/([^/]+)/mesh\.obj)", serve_result("mesh", "model/obj"));
    srv.Get(R"(/api/v1/jobs/([^/]+)/report)", serve_result("report", "application/json"));
}

} // namespace service
} // namespace sk13
