/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/service/json_io.hpp
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

#ifndef SK13_SERVICE_JSON_IO_HPP
#define SK13_SERVICE_JSON_IO_HPP

#include "sk13/fitting/fitter.hpp"

#include "json.hpp"

namespace sk13 {
namespace service {

nlohmann::json to_json(const losses::LossTerms& terms);
nlohmann::json to_json(const fitting::FitReport& report);
nlohmann::json to_json(const fitting::FitConfig& config);

/**
 * Applies the keys of `overrides` to `config`. Recognized keys: coarse_iters,
 * detail_iters, learning_rate, adam_beta1, adam_beta2, adam_eps, fd_step, render_size,
 * seed, detail_magnitude, enhance_input, render_mode ("sketch" or "shaded") and the
 * objects loss_weights {eye_pairs, mouth_pairs, contour_pairs, photometric,
 * regularization} and gctd {kernel_radius, sigma_spatial, sigma_range_base,
 * variance_window, adapt_strength}. Unknown keys or wrong types throw ValidationError
 * naming the key; the result is validated.
 */
void apply_fit_overrides(fitting::FitConfig& config, const nlohmann::json& overrides);

} // namespace service
} // namespace sk13

#endif // SK13_SERVICE_JSON_IO_HPP
