/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/service/service.hpp
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
#pragma once

#ifndef SK13_SERVICE_SERVICE_HPP
#define SK13_SERVICE_SERVICE_HPP

#include "sk13/model/head_model.hpp"
#include "sk13/service/job_store.hpp"
#include "sk13/service/service_config.hpp"

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace sk13 {
namespace service {

/**
 * The reconstruction service: HTTP front end, job store and a FIFO worker pool of
 * max_concurrent threads sharing one immutable asset.
 *
 *   POST /api/v1/reconstruct        multipart sketch (PNG), landmarks (CSV), config (JSON) -> 202 {job_id}
 *   GET  /api/v1/jobs/{id}          job record
 *   GET  /api/v1/jobs/{id}/mesh.obj mesh of a done job, 409 before
 *   GET  /api/v1/jobs/{id}/report   fit reports of a done job, 409 before
 *   GET  /api/v1/health             200
 *
 * Errors carry {"error": {"code": ..., "message": ...}}.
 */
class Service
{
public:
    Service(ServiceConfig config, model::HeadModelAsset asset);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /**
     * Recovers the store (queued jobs re-enter the queue in submission order, jobs
     * left running are marked failed) and starts the workers.
     */
    void start();

    /// Binds and serves until stop(); returns false if the address could not be bound.
    bool listen();

    /// Binds to a free port on the configured host and returns it, or -1.
    int bind_any_port();
    bool listen_after_bind();

    /// Stops the HTTP server and the workers; running fits finish first.
    void stop();

    const ServiceConfig& config() const { return config_; }
    JobStore& store() { return store_; }

    /// Runs one job to completion on the calling thread.
    void run_job(const std::string& id);

private:
    void install_routes();
    void worker_loop();
    std::size_t queued_count() const;

    ServiceConfig config_;
    const model::HeadModelAsset asset_;
    JobStore store_;
    std::unique_ptr<httplib::Server> server_;

    mutable std::mutex queue_mutex_;
    std::condition_variable queue_cv_;
    std::deque<std::string> queue_;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

} // namespace service
} // namespace sk13

#endif // SK13_SERVICE_SERVICE_HPP
