/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/service/job_store.hpp
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

#ifndef SK13_SERVICE_JOB_STORE_HPP
#define SK13_SERVICE_JOB_STORE_HPP

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace sk13 {
namespace service {

enum class JobState
{
    queued,
    running,
    done,
    failed
};

std::string to_string(JobState state);
JobState job_state_from_string(const std::string& text);

struct RequestSummary
{
    int width = 0;
    int height = 0;
    bool has_landmarks = false;
    nlohmann::json config_overrides = nlohmann::json::object();
};

struct Job
{
    std::string id;
    /// Submission order, used to restore FIFO order after a restart.
    std::uint64_t sequence = 0;
    JobState state = JobState::queued;
    std::string created;
    std::string updated;
    RequestSummary request;
    /// File names inside the job directory, set once the job is done.
    std::optional<std::string> mesh_path;
    std::optional<std::string> params_path;
    std::optional<std::string> report_path;
    std::optional<std::string> error;
};

nlohmann::json to_json(const Job& job);
Job job_from_json(const nlohmann::json& j);

/// Current UTC time as ISO 8601 with milliseconds.
std::string utc_timestamp();

/**
 * A directory of job folders: <root>/<id>/job.json plus the request inputs
 * (sketch.png, landmarks.csv) and, once done, mesh.obj, params.sk13p and report.json.
 * job.json is replaced atomically. All mutations go through one mutex.
 */
class JobStore
{
public:
    explicit JobStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path job_dir(const std::string& id) const;

    /// Persists the inputs and a queued job record; returns the new job.
    Job create(const std::string& sketch_png, const std::optional<std::string>& landmarks_csv,
               const RequestSummary& summary);

    std::optional<Job> get(const std::string& id) const;
    void save(const Job& job);

    /// Moves a job to a new state (queued -> running -> done | failed only).
    Job transition(const std::string& id, JobState next, const std::optional<std::string>& error = {});

    /// Every readable job, in submission order.
    std::vector<Job> load_all() const;

private:
    void write_record(const Job& job) const;
    std::optional<Job> read_record(const std::string& id) const;
    std::string new_id();

    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::uint64_t next_sequence_ = 0;
};

/// Ids are 32 lowercase hex characters.
bool is_valid_job_id(const std::string& id);

} // namespace service
} // namespace sk13

#endif // SK13_SERVICE_JOB_STORE_HPP
