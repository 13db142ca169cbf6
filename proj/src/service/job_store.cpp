/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/service/job_store.cpp
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
#include "sk13/service/job_store.hpp"
#include "sk13/core/error.hpp"
#include "sk13/core/image_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <span>
#include <sstream>

namespace sk13 {
namespace service {

using nlohmann::json;

std::string to_string(JobState state)
{
    switch (state)
    {
    case JobState::queued:
        return "queued";
    case JobState::running:
        return "running";
    case JobState::done:
        return "done";
    case JobState::failed:
        return "failed";
    }
    return "failed";
}

JobState job_state_from_string(const std::string& text)
{
    for (JobState s : {JobState::queued, JobState::running, JobState::done, JobState::failed})
    {
        if (to_string(s) == text)
        {
            return s;
        }
    }
    throw FormatError("unknown job state '" + text + "'");
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
    const auto millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&seconds, &tm);
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(millis));
    return buffer;
}

json to_json(const Job& job)
{
    const auto optional = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
    return {{"id", job.id},
            {"sequence", job.sequence},
            {"state", to_string(job.state)},
            {"created", job.created},
            {"updated", job.updated},
            {"request",
             {{"width", job.request.width},
              {"height", job.request.height},
              {"has_landmarks", job.request.has_landmarks},
              {"config_overrides", job.request.config_overrides}}},
            {"result", {{"mesh", optional(job.mesh_path)}, {"params", optional(job.params_path)},
                        {"report", optional(job.report_path)}}},
            {"error", optional(job.error)}};
}

Job job_from_json(const json& j)
{
    try
    {
        const auto optional = [](const json& v) {
            return v.is_null() ? std::optional<std::string>() : std::optional(v.get<std::string>());
        };
        Job job;
        job.id = j.at("id").get<std::string>();
        job.sequence = j.at("sequence").get<std::uint64_t>();
        job.state = job_state_from_string(j.at("state").get<std::string>());
        job.created = j.at("created").get<std::string>();
        job.updated = j.at("updated").get<std::string>();
        const json& r = j.at("request");
        job.request.width = r.at("width").get<int>();
        job.request.height = r.at("height").get<int>();
        job.request.has_landmarks = r.at("has_landmarks").get<bool>();
        job.request.config_overrides = r.at("config_overrides");
        const json& res = j.at("result");
        job.mesh_path = optional(res.at("mesh"));
        job.params_path = optional(res.at("params"));
        job.report_path = optional(res.at("report"));
        job.error = optional(j.at("error"));
        return job;
    }
    catch (const json::exception& e)
    {
        throw FormatError(std::string("malformed job record: ") + e.what());
    }
}

bool is_valid_job_id(const std::string& id)
{
    return id.size() == 32 &&
           std::all_of(id.begin(), id.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

JobStore::JobStore(std::filesystem::path root) : root_(std::move(root))
{
    std::filesystem::create_directories(root_);
    for (const Job& job : load_all())
    {
        next_sequence_ = std::max(next_sequence_, job.sequence + 1);
    }
}

std::filesystem::path JobStore::job_dir(const std::string& id) const
{
    if (!is_valid_job_id(id))
    {
        throw ValidationError("job_id", "malformed job id");
    }
    return root_ / id;
}

std::string JobStore::new_id()
{
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    char buffer[33];
    std::snprintf(buffer, sizeof buffer, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                  static_cast<unsigned long long>(rng()));
    return buffer;
}

void JobStore::write_record(const Job& job) const
{
    const std::filesystem::path dir = job_dir(job.id);
    const std::filesystem::path tmp = dir / "job.json.tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << to_json(job).dump(2) << '\n';
        out.flush();
        if (!out)
        {
            throw Error("cannot write job record for " + job.id);
        }
    }
    std::filesystem::rename(tmp, dir / "job.json");
}

std::optional<Job> JobStore::read_record(const std::string& id) const
{
    if (!is_valid_job_id(id))
    {
        return std::nullopt;
    }
    std::ifstream in(root_ / id / "job.json", std::ios::binary);
    if (!in)
    {
        return std::nullopt;
    }
    try
    {
        return job_from_json(json::parse(in));
    }
    catch (const json::exception&)
    {
        return std::nullopt;
    }
    catch (const FormatError&)
    {
        return std::nullopt;
    }
}

Job JobStore::create(const std::string& sketch_png, const std::optional<std::string>& landmarks_csv,
                     const RequestSummary& summary)
{
    std::lock_guard lock(mutex_);
    Job job;
    do
    {
        job.id = new_id();
    } while (std::filesystem::exists(root_ / job.id));
    job.sequence = next_sequence_++;
    job.state = JobState::queued;
    job.created = job.updated = utc_timestamp();
    job.request = summary;

    const std::filesystem::path dir = root_ / job.id;
    std::filesystem::create_directories(dir);
    const auto bytes = [](const std::string& s) {
        return std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
    };
    write_file_bytes(dir / "sketch.png", bytes(sketch_png));
    if (landmarks_csv)
    {
        write_file_bytes(dir / "landmarks.csv", bytes(*landmarks_csv));
    }
    write_record(job);
    return job;
}

std::optional<Job> JobStore::get(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    return read_record(id);
}

void JobStore::save(const Job& job)
{
    std::lock_guard lock(mutex_);
    write_record(job);
}

Job JobStore::transition(const std::string& id, JobState next, const std::optional<std::string>& error)
{
    std::lock_guard lock(mutex_);
    std::optional<Job> job = read_record(id);
    if (!job)
    {
        throw Error("unknown job " + id);
    }
    const bool allowed = (job->state == JobState::queued && (next == JobState::running || next == JobState::failed)) ||
                         (job->state == JobState::running && (next == JobState::done || next == JobState::failed));
    if (!allowed)
    {
        throw Error("illegal job transition " + to_string(job->state) + " -> " + to_string(next));
    }
    job->state = next;
    job->updated = utc_timestamp();
    if (next == JobState::done)
    {
        job->mesh_path = "mesh.obj";
        job->params_path = "params.sk13p";
        job->report_path = "report.json";
    }
    if (error)
    {
        job->error = error;
    }
    write_record(*job);
    return *job;
}

std::vector<Job> JobStore::load_all() const
{
    std::lock_guard lock(mutex_);
    std::vector<Job> jobs;
    for (const auto& entry : std::filesystem::directory_iterator(root_))
    {
        if (!entry.is_directory())
        {
            continue;
        }
        if (std::optional<Job> job = read_record(entry.path().filename().string()))
        {
            jobs.push_back(std::move(*job));
        }
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.sequence < b.sequence; });
    return jobs;
}

} // namespace service
} // namespace sk13
