/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/fitting/fitter.hpp
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

#ifndef SK13_FITTING_FITTER_HPP
#define SK13_FITTING_FITTER_HPP

#include "sk13/core/image.hpp"
#include "sk13/fitting/adam.hpp"
#include "sk13/gctd/gctd.hpp"
#include "sk13/losses/landmarks.hpp"
#include "sk13/losses/losses.hpp"
#include "sk13/model/head_model.hpp"
#include "sk13/render/rasterizer.hpp"

#include "Eigen/Core"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sk13 {
namespace fitting {

/// Step-size multipliers per parameter block, applied on top of the base learning rate.
struct BlockLearningRates
{
    double shape = 5.0;
    double pose = 1.0;
    double expression = 5.0;
    double albedo = 5.0;
    double lighting = 5.0;
    double camera_scale = 10.0;
    double camera_translation = 20.0;
    double detail = 5.0;
};

struct FitConfig
{
    int coarse_iters = 600;
    int detail_iters = 300;
    double learning_rate = 1e-2;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double fd_step = 1e-3;
    int render_size = 128;
    std::uint64_t seed = 0;
    bool use_landmarks = true;
    losses::LossWeights loss_weights;
    losses::PairSpec pairs = losses::PairSpec::standard();
    BlockLearningRates block_rates;
    /// Scale of the detail displacement along the normals.
    double detail_magnitude = 1.0;
    /// Run the contour/texture enhancement on the input before fitting.
    bool enhance_input = true;
    gctd::GctdConfig gctd;
    render::RenderMode render_mode = render::RenderMode::sketch;

    void validate() const;
    AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_eps}; }
};

struct FitReport
{
    std::string stage;
    int iterations = 0;
    /// Objective at every evaluated iterate (iterations + 1 values) and its running minimum.
    std::vector<double> objective;
    std::vector<double> best_objective;
    losses::LossTerms initial_terms;
    losses::LossTerms final_terms;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    double wall_seconds = 0.0;
    bool converged = false;
    std::uint64_t seed = 0;
    /// Model landmarks of the returned parameters in input-image pixels.
    Eigen::Matrix2Xd projected_landmarks;

    /// Equality of everything except wall time.
    bool same_result(const FitReport& other) const;
};

struct FitResult
{
    model::ModelParams params;
    FitReport report;
};

/**
 * Coarse stage: Adam on landmark + mutual distance + w_pho * photometric + w_reg * reg
 * over shape, pose, expression, albedo, lighting and camera. Landmark terms use analytic
 * gradients, the photometric term central differences at render_size. Returns the best
 * iterate seen. Landmarks are required when cfg.use_landmarks is set and ignored otherwise.
 */
FitResult fit_coarse(const Image& sketch, const std::optional<losses::LandmarkSet>& landmarks,
                     const model::HeadModelAsset& asset, const FitConfig& cfg);

/// Detail stage: optimizes the detail code only, everything else frozen at `coarse`.
FitResult fit_detail(const Image& sketch, const model::ModelParams& coarse,
                     const std::optional<losses::LandmarkSet>& landmarks, const model::HeadModelAsset& asset,
                     const FitConfig& cfg);

/// Starting point of the coarse stage for an input of the given size.
model::ModelParams initial_params(const model::HeadModelAsset& asset, int width, int height,
                                  const std::optional<losses::LandmarkSet>& landmarks);

struct Reconstruction
{
    model::Mesh mesh;
    model::ModelParams params;
    FitReport coarse;
    FitReport detail;
};

/// Enhancement, coarse fit, detail fit and the final detailed mesh.
Reconstruction reconstruct(const Image& sketch, const std::optional<losses::LandmarkSet>& landmarks,
                           const model::HeadModelAsset& asset, const FitConfig& cfg);

/// Mean Euclidean distance between two 2 x 68 landmark sets.
double mean_landmark_error(const Eigen::Matrix2Xd& a, const Eigen::Matrix2Xd& b);

} // namespace fitting
} // namespace sk13

#endif // SK13_FITTING_FITTER_HPP
