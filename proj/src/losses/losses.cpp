/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/losses/losses.cpp
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
#include "sk13/losses/losses.hpp"
#include "sk13/core/error.hpp"

#include <cmath>

namespace sk13 {
namespace losses {

namespace {

void require_projected(const Eigen::Matrix2Xd& projected)
{
    if (projected.cols() != landmark_count)
    {
        throw ValidationError("projected landmarks", "expected 68 points, found " + std::to_string(projected.cols()));
    }
}

} // namespace

double landmark_loss(const LandmarkSet& target, const Eigen::Matrix2Xd& projected)
{
    target.validate();
    require_projected(projected);
    double loss = 0.0;
    for (int i = 0; i < landmark_count; ++i)
    {
        loss += target.weights[i] * ((target.points.col(i) - projected.col(i)).cwiseAbs().sum());
    }
    return loss;
}

double pair_loss(const LandmarkSet& target, const Eigen::Matrix2Xd& projected, const std::vector<IndexPair>& pairs)
{
    double loss = 0.0;
    for (const auto& [i, j] : pairs)
    {
        const Eigen::Vector2d target_offset = target.points.col(i) - target.points.col(j);
        const Eigen::Vector2d model_offset = projected.col(i) - projected.col(j);
        loss += (target_offset - model_offset).cwiseAbs().sum();
    }
    return loss;
}

double mutual_distance_loss(const LandmarkSet& target, const Eigen::Matrix2Xd& projected, const PairSpec& pairs,
                            const LossWeights& weights)
{
    target.validate();
    require_projected(projected);
    pairs.validate();
    return weights.eye_pairs * pair_loss(target, projected, pairs.eye_pairs) +
           weights.mouth_pairs * pair_loss(target, projected, pairs.mouth_pairs) +
           weights.contour_pairs * pair_loss(target, projected, pairs.contour_pairs);
}

double photometric_loss(const Image& input, const render::RenderedImage& rendered)
{
    if (input.channels != 1 || rendered.pixels.channels != 1 || input.width != rendered.width() ||
        input.height != rendered.height() || rendered.mask.size() != input.pixel_count())
    {
        throw ValidationError("photometric", "input sketch and render must be grayscale images of equal size");
    }
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < rendered.mask.size(); ++p)
    {
        if (rendered.mask[p])
        {
            total += std::abs(input.pixels[p] - rendered.pixels.pixels[p]);
            ++count;
        }
    }
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

double regularization(const model::ModelParams& params, Stage stage)
{
    if (stage == Stage::coarse)
    {
        return params.shape.squaredNorm() + params.expression.squaredNorm() + params.albedo.squaredNorm();
    }
    return params.detail.squaredNorm();
}

double coarse_objective(const LossTerms& terms, const LossWeights& weights)
{
    return terms.landmark + terms.mutual_distance + weights.photometric * terms.photometric +
           weights.regularization * terms.regularization;
}

double detail_objective(const LossTerms& terms, const LossWeights& weights)
{
    return terms.mutual_distance + weights.photometric * terms.photometric +
           weights.regularization * terms.regularization;
}

} // namespace losses
} // namespace sk13
