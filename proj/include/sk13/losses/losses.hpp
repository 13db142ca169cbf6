/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/losses/losses.hpp
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

#ifndef SK13_LOSSES_LOSSES_HPP
#define SK13_LOSSES_LOSSES_HPP

#include "sk13/core/image.hpp"
#include "sk13/losses/landmarks.hpp"
#include "sk13/model/head_model.hpp"
#include "sk13/render/rasterizer.hpp"

namespace sk13 {
namespace losses {

/// Weighted L1 landmark loss: sum_i w_i |k_i - p_i|_1, where p are projected model landmarks.
double landmark_loss(const LandmarkSet& target, const Eigen::Matrix2Xd& projected);

/// Unweighted pair term of one region: sum over (i, j) of |(k_i - k_j) - (p_i - p_j)|_1.
double pair_loss(const LandmarkSet& target, const Eigen::Matrix2Xd& projected, const std::vector<IndexPair>& pairs);

/// Region-weighted sum of the eye, inner-mouth and contour pair terms.
double mutual_distance_loss(const LandmarkSet& target, const Eigen::Matrix2Xd& projected, const PairSpec& pairs,
                            const LossWeights& weights);

/**
 * Masked L1 between the input sketch and a render, averaged over the render's
 * mask (0 for an empty mask). Sizes must match.
 */
double photometric_loss(const Image& input, const render::RenderedImage& rendered);

enum class Stage
{
    coarse,
    detail
};

/// Squared L2 norm of the codes of a stage: shape, expression and albedo (coarse) or detail.
double regularization(const model::ModelParams& params, Stage stage);

/// The individual terms that make up the stage objectives.
struct LossTerms
{
    double landmark = 0.0;
    double mutual_distance = 0.0;
    double photometric = 0.0;
    double regularization = 0.0;
};

/// landmark + mutual_distance + w_pho * photometric + w_reg * regularization
double coarse_objective(const LossTerms& terms, const LossWeights& weights);

/// mutual_distance + w_pho * photometric + w_reg * regularization (no landmark term)
double detail_objective(const LossTerms& terms, const LossWeights& weights);

} // namespace losses
} // namespace sk13

#endif // SK13_LOSSES_LOSSES_HPP
