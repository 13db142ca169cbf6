/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/service/service_config.cpp
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
#include "sk13/service/service_config.hpp"
#include "sk13/core/error.hpp"
#include "sk13/service/json_io.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>

namespace sk13 {
namespace service {

void ServiceConfig::validate() const
{
    if (port < 0 || port > 65535)
    {
        throw ValidationError("port", "must lie in [0, 65535]");
    }
    if (max_concurrent < 1)
    {
        throw ValidationError("max_concurrent", "must be at least 1");
    }
    if (max_queue < 1)
    {
        throw ValidationError("max_queue", "must be at least 1");
    }
    if (max_upload_bytes < 1)
    {
        throw ValidationError("max_upload_bytes", "must be positive");
    }
    if (max_image_side < 1)
    {
        throw ValidationError("max_image_side", "must be positive");
    }
    fit.validate();
}

ServiceConfig load_service_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigurationError("cannot open config file " + path.string());
    }
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw FormatError("config file " + path.string() + ": " + e.what());
    }
    if (!doc.is_object())
    {
        throw ValidationError("config", "top level must be an object");
    }
    const std::filesystem::path base = path.parent_path();
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() || base.empty() ? fp : base / fp;
    };
    ServiceConfig cfg;
    for (const auto& [key, v] : doc.items())
    {
        const auto need = [&](bool ok) {
            if (!ok)
            {
                throw ValidationError(key, "wrong type");
            }
        };
        if (key == "host")
        {
            need(v.is_string());
            cfg.host = v.get<std::string>();
        }
        else if (key == "port")
        {
            need(v.is_number_integer());
            cfg.port = v.get<int>();
        }
        else if (key == "asset")
        {
            need(v.is_string());
            cfg.asset_path = resolve(v.get<std::string>());
        }
        else if (key == "job_store")
        {
            need(v.is_string());
            cfg.store_dir = resolve(v.get<std::string>());
        }
        else if (key == "max_concurrent")
        {
            need(v.is_number_integer());
            cfg.max_concurrent = v.get<int>();
        }
        else if (key == "max_queue")
        {
            need(v.is_number_unsigned());
            cfg.max_queue = v.get<std::size_t>();
        }
        else if (key == "max_upload_bytes")
        {
            need(v.is_number_unsigned());
            cfg.max_upload_bytes = v.get<std::size_t>();
        }
        else if (key == "max_image_side")
        {
            need(v.is_number_integer());
            cfg.max_image_side = v.get<int>();
        }
        else if (key == "fit")
        {
            apply_fit_overrides(cfg.fit, v);
        }
        else
        {
            throw ValidationError(key, "unknown configuration key");
        }
    }
    cfg.validate();
    return cfg;
}

ServiceConfig service_config_from_env()
{
    const char* path = std::getenv("SK13_CONFIG");
    if (path == nullptr || *path == '\0')
    {
        return {};
    }
    return load_service_config(path);
}

} // namespace service
} // namespace sk13
