/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/fitting/adam.cpp
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
#include "sk13/fitting/adam.hpp"
#include "sk13/core/error.hpp"

#include <cmath>

namespace sk13 {
namespace fitting {

void AdamConfig::validate() const
{
    if (!(learning_rate > 0.0))
    {
        throw ValidationError("learning_rate", "must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    {
        throw ValidationError("adam_beta", "moment decay rates must lie in [0, 1)");
    }
    if (!(epsilon > 0.0))
    {
        throw ValidationError("adam_eps", "must be positive");
    }
}

std::string block_name(std::span<const ParameterBlock> blocks, std::size_t index)
{
    for (const ParameterBlock& b : blocks)
    {
        if (index >= b.offset && index < b.offset + b.size)
        {
            return b.name + "[" + std::to_string(index - b.offset) + "]";
        }
    }
    return "index " + std::to_string(index);
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, const AdamConfig& config,
               std::span<const ParameterBlock> blocks)
{
    if (params.size() != grads.size() || state.first_moment.size() != params.size() ||
        state.second_moment.size() != params.size())
    {
        throw ConfigurationError("adam: parameter, gradient and moment lengths differ");
    }
    for (std::size_t i = 0; i < grads.size(); ++i)
    {
        if (!std::isfinite(grads[i]))
        {
            throw OptimizationError("non-finite gradient in parameter block " + block_name(blocks, i));
        }
    }
    std::vector<double> scale(params.size(), 1.0);
    for (const ParameterBlock& b : blocks)
    {
        for (std::size_t i = b.offset; i < b.offset + b.size && i < scale.size(); ++i)
        {
            scale[i] = b.lr_scale;
        }
    }
    ++state.step;
    const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = config.beta1 * m + (1.0 - config.beta1) * grads[i];
        v = config.beta2 * v + (1.0 - config.beta2) * grads[i] * grads[i];
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params[i] -= config.learning_rate * scale[i] * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
}

} // namespace fitting
} // namespace sk13
