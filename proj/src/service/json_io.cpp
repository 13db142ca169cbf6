/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/service/json_io.cpp
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
#include "sk13/service/json_io.hpp"
#include "sk13/core/error.hpp"

#include <string>

namespace sk13 {
namespace service {

using nlohmann::json;

json to_json(const losses::LossTerms& terms)
{
    return {{"landmark", terms.landmark},
            {"mutual_distance", terms.mutual_distance},
            {"photometric", terms.photometric},
            {"regularization", terms.regularization}};
}

json to_json(const fitting::FitReport& report)
{
    json landmarks = json::array();
    for (Eigen::Index k = 0; k < report.projected_landmarks.cols(); ++k)
    {
        landmarks.push_back({report.projected_landmarks(0, k), report.projected_landmarks(1, k)});
    }
    return {{"stage", report.stage},
            {"iterations", report.iterations},
            {"objective", report.objective},
            {"best_objective", report.best_objective},
            {"initial_terms", to_json(report.initial_terms)},
            {"final_terms", to_json(report.final_terms)},
            {"initial_objective", report.initial_objective},
            {"final_objective", report.final_objective},
            {"wall_seconds", report.wall_seconds},
            {"converged", report.converged},
            {"seed", report.seed},
            {"projected_landmarks", landmarks}};
}

json to_json(const fitting::FitConfig& c)
{
    return {{"coarse_iters", c.coarse_iters},
            {"detail_iters", c.detail_iters},
            {"learning_rate", c.learning_rate},
            {"adam_beta1", c.adam_beta1},
            {"adam_beta2", c.adam_beta2},
            {"adam_eps", c.adam_eps},
            {"fd_step", c.fd_step},
            {"render_size", c.render_size},
            {"seed", c.seed},
            {"detail_magnitude", c.detail_magnitude},
            {"enhance_input", c.enhance_input},
            {"render_mode", c.render_mode == render::RenderMode::sketch ? "sketch" : "shaded"},
            {"loss_weights",
             {{"eye_pairs", c.loss_weights.eye_pairs},
              {"mouth_pairs", c.loss_weights.mouth_pairs},
              {"contour_pairs", c.loss_weights.contour_pairs},
              {"photometric", c.loss_weights.photometric},
              {"regularization", c.loss_weights.regularization}}},
            {"gctd",
             {{"kernel_radius", c.gctd.kernel_radius},
              {"sigma_spatial", c.gctd.sigma_spatial},
              {"sigma_range_base", c.gctd.sigma_range_base},
              {"variance_window", c.gctd.variance_window},
              {"adapt_strength", c.gctd.adapt_strength}}}};
}

namespace {

double number(const json& v, const std::string& key)
{
    if (!v.is_number())
    {
        throw ValidationError(key, "expected a number");
    }
    return v.get<double>();
}

int integer(const json& v, const std::string& key)
{
    if (!v.is_number_integer())
    {
        throw ValidationError(key, "expected an integer");
    }
    const auto i = v.get<long long>();
    if (i < -2147483647LL || i > 2147483647LL)
    {
        throw ValidationError(key, "out of range");
    }
    return static_cast<int>(i);
}

void require_object(const json& v, const std::string& key)
{
    if (!v.is_object())
    {
        throw ValidationError(key, "expected an object");
    }
}

} // namespace

void apply_fit_overrides(fitting::FitConfig& c, const json& overrides)
{
    require_object(overrides, "config");
    for (const auto& [key, v] : overrides.items())
    {
        if (key == "coarse_iters")
            c.coarse_iters = integer(v, key);
        else if (key == "detail_iters")
            c.detail_iters = integer(v, key);
        else if (key == "learning_rate")
            c.learning_rate = number(v, key);
        else if (key == "adam_beta1")
            c.adam_beta1 = number(v, key);
        else if (key == "adam_beta2")
            c.adam_beta2 = number(v, key);
        else if (key == "adam_eps")
            c.adam_eps = number(v, key);
        else if (key == "fd_step")
            c.fd_step = number(v, key);
        else if (key == "render_size")
            c.render_size = integer(v, key);
        else if (key == "detail_magnitude")
            c.detail_magnitude = number(v, key);
        else if (key == "seed")
        {
            if (!v.is_number_unsigned())
            {
                throw ValidationError(key, "expected a non-negative integer");
            }
            c.seed = v.get<std::uint64_t>();
        }
        else if (key == "enhance_input")
        {
            if (!v.is_boolean())
            {
                throw ValidationError(key, "expected true or false");
            }
            c.enhance_input = v.get<bool>();
        }
        else if (key == "render_mode")
        {
            if (v == "sketch")
                c.render_mode = render::RenderMode::sketch;
            else if (v == "shaded")
                c.render_mode = render::RenderMode::shaded;
            else
                throw ValidationError(key, "expected \"sketch\" or \"shaded\"");
        }
        else if (key == "loss_weights")
        {
            require_object(v, key);
            for (const auto& [k, w] : v.items())
            {
                const std::string name = key + "." + k;
                if (k == "eye_pairs")
                    c.loss_weights.eye_pairs = number(w, name);
                else if (k == "mouth_pairs")
                    c.loss_weights.mouth_pairs = number(w, name);
                else if (k == "contour_pairs")
                    c.loss_weights.contour_pairs = number(w, name);
                else if (k == "photometric")
                    c.loss_weights.photometric = number(w, name);
                else if (k == "regularization")
                    c.loss_weights.regularization = number(w, name);
                else
                    throw ValidationError(name, "unknown key");
            }
        }
        else if (key == "gctd")
        {
            require_object(v, key);
            for (const auto& [k, g] : v.items())
            {
                const std::string name = key + "." + k;
                if (k == "kernel_radius")
                    c.gctd.kernel_radius = integer(g, name);
                else if (k == "sigma_spatial")
                    c.gctd.sigma_spatial = number(g, name);
                else if (k == "sigma_range_base")
                    c.gctd.sigma_range_base = number(g, name);
                else if (k == "variance_window")
                    c.gctd.variance_window = integer(g, name);
                else if (k == "adapt_strength")
                    c.gctd.adapt_strength = number(g, name);
                else
                    throw ValidationError(name, "unknown key");
            }
        }
        else
        {
            throw ValidationError(key, "unknown configuration key");
        }
    }
    c.validate();
}

} // namespace service
} // namespace sk13
