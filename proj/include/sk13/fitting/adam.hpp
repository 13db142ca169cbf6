/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/fitting/adam.hpp
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

#ifndef SK13_FITTING_ADAM_HPP
#define SK13_FITTING_ADAM_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sk13 {
namespace fitting {

struct AdamConfig
{
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

/// A named slice of the flat parameter vector with its own step-size multiplier.
struct ParameterBlock
{
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
    double lr_scale = 1.0;
};

struct AdamState
{
    long step = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;

    AdamState() = default;
    explicit AdamState(std::size_t parameter_count)
        : first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0)
    {
    }
};

/**
 * One bias-corrected Adam update in place.
 *
 * Each coordinate moves by lr * lr_scale(block) * m_hat / (sqrt(v_hat) + eps). With
 * `blocks` empty every coordinate uses lr_scale 1. A non-finite gradient throws
 * OptimizationError naming the block it belongs to, before anything is modified.
 */
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, const AdamConfig& config,
               std::span<const ParameterBlock> blocks = {});

/// Name of the block holding coordinate `index`, or "index <i>" when no block covers it.
std::string block_name(std::span<const ParameterBlock> blocks, std::size_t index);

} // namespace fitting
} // namespace sk13

#endif // SK13_FITTING_ADAM_HPP
