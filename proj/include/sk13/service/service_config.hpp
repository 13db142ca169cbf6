/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/service/service_config.hpp
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

#ifndef SK13_SERVICE_SERVICE_CONFIG_HPP
#define SK13_SERVICE_SERVICE_CONFIG_HPP

#include "sk13/fitting/fitter.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

namespace sk13 {
namespace service {

struct ServiceConfig
{
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path asset_path;
    std::filesystem::path store_dir = "sk13-jobs";
    int max_concurrent = 1;
    /// Submissions are refused with 429 while this many jobs wait in the queue.
    std::size_t max_queue = 64;
    std::size_t max_upload_bytes = 8u << 20;
    int max_image_side = 2048;
    fitting::FitConfig fit;

    void validate() const;
};

/**
 * Reads a JSON config: {"host", "port", "asset", "job_store", "max_concurrent",
 * "max_queue", "max_upload_bytes", "max_image_side", "fit": {FitConfig overrides}}.
 * Every key is optional. Relative paths resolve against the file's directory.
 */
ServiceConfig load_service_config(const std::filesystem::path& path);

/// The config named by SK13_CONFIG, or defaults when the variable is unset or empty.
ServiceConfig service_config_from_env();

} // namespace service
} // namespace sk13

#endif // SK13_SERVICE_SERVICE_CONFIG_HPP
