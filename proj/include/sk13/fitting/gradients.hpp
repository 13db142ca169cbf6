/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/fitting/gradients.hpp
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

#ifndef SK13_FITTING_GRADIENTS_HPP
#define SK13_FITTING_GRADIENTS_HPP

#include "sk13/fitting/adam.hpp"
#include "sk13/losses/landmarks.hpp"
#include "sk13/model/head_model.hpp"

#include "Eigen/Core"

#include <functional>
#include <vector>

namespace sk13 {
namespace fitting {

/**
 * Flat layout of the coarse-stage unknowns:
 * [shape | pose (6) | expression | albedo | lighting (27) | camera scale | camera translation (2)].
 */
struct CoarseLayout
{
    ParameterBlock shape;
    ParameterBlock pose;
    ParameterBlock expression;
    ParameterBlock albedo;
    ParameterBlock lighting;
    ParameterBlock camera_scale;
    ParameterBlock camera_translation;

    explicit CoarseLayout(const model::HeadModelAsset& asset);

    std::size_t size() const { return camera_translation.offset + camera_translation.size; }
    std::vector<ParameterBlock> blocks() const;
};

Eigen::VectorXd pack_coarse(const model::ModelParams& params, const CoarseLayout& layout);

/// Writes the coarse unknowns of `x` into a copy of `base` (the detail code is kept).
model::ModelParams unpack_coarse(const Eigen::VectorXd& x, const CoarseLayout& layout, const model::ModelParams& base);

struct GradientResult
{
    double value = 0.0;
    Eigen::VectorXd gradient;
};

/**
 * L_lmk + L_md and its subgradient over the coarse layout, by the chain rule through
 * the camera, the global and jaw rotations and the linear shape and expression maps.
 * Uses sign(0) = 0, so a perfect fit has zero gradient. Albedo and lighting entries are 0.
 */
GradientResult analytic_gradients(const model::ModelParams& params, const model::HeadModelAsset& asset,
                                  const losses::LandmarkSet& target, const losses::PairSpec& pairs,
                                  const losses::LossWeights& weights);

/**
 * Projected landmarks of the detailed mesh: the posed landmark vertices moved along the
 * coarse vertex normals by magnitude * (detail_basis * detail).
 */
Eigen::Matrix2Xd detailed_landmark_projection(const model::ModelParams& params, const model::HeadModelAsset& asset,
                                              double magnitude);

/// L_md of the detailed landmarks and its gradient over the detail code.
GradientResult detail_mutual_distance_gradient(const model::ModelParams& params, const model::HeadModelAsset& asset,
                                               const losses::LandmarkSet& target, const losses::PairSpec& pairs,
                                               const losses::LossWeights& weights, double magnitude);

/**
 * Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate, or for
 * the listed coordinates only (others are 0). A non-finite value at any probe throws
 * OptimizationError.
 */
Eigen::VectorXd fd_gradients(const std::function<double(const Eigen::VectorXd&)>& objective, const Eigen::VectorXd& x,
                             double step, const std::vector<Eigen::Index>& coordinates = {});

} // namespace fitting
} // namespace sk13

#endif // SK13_FITTING_GRADIENTS_HPP
