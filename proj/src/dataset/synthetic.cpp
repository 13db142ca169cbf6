/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/dataset/synthetic.cpp
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
#include "sk13/dataset/synthetic.hpp"
#include "sk13/core/error.hpp"
#include "sk13/render/camera.hpp"
#include "sk13/render/rasterizer.hpp"
#include "sk13/render/sh_lighting.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace sk13 {
namespace dataset {

SyntheticPair generate_synthetic_pair(const model::HeadModelAsset& asset, std::uint64_t seed, int image_size,
                                      double param_scale)
{
    if (image_size < 16)
    {
        throw ValidationError("image_size", "must be at least 16");
    }
    if (!(param_scale >= 0.0) || !std::isfinite(param_scale))
    {
        throw ValidationError("param_scale", "must be finite and non-negative");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> code(0.0, param_scale);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double max_angle = 20.0 * std::numbers::pi / 180.0;

    model::ModelParams p = model::ModelParams::zeros(asset);
    for (Eigen::Index i = 0; i < p.shape.size(); ++i)
    {
        p.shape[i] = code(rng);
    }
    for (Eigen::Index i = 0; i < p.expression.size(); ++i)
    {
        p.expression[i] = code(rng);
    }
    for (int i = 0; i < 3; ++i)
    {
        p.pose[i] = max_angle * unit(rng);
    }
    // Jaw opens by rotating about the x axis only.
    p.pose[3] = 0.1 * (0.5 * (unit(rng) + 1.0));

    p.lighting = render::neutral_lighting();
    const double brightness = 1.0 + 0.1 * unit(rng);
    const Eigen::Vector3d direction(0.3 * unit(rng), 0.3 * unit(rng), -0.3 * (0.5 * (unit(rng) + 1.0)));
    for (int c = 0; c < 3; ++c)
    {
        p.lighting[9 * c] *= brightness;
        p.lighting[9 * c + 1] = direction.y();
        p.lighting[9 * c + 2] = direction.z();
        p.lighting[9 * c + 3] = direction.x();
    }

    p.camera.scale = 0.4 * image_size * (1.0 + 0.05 * unit(rng));
    p.camera.translation = Eigen::Vector2d(0.5 * image_size + 0.03 * image_size * unit(rng),
                                           0.5 * image_size + 0.03 * image_size * unit(rng));

    SyntheticPair pair;
    const model::Mesh mesh = model::evaluate_model(p, asset);
    pair.sketch = render::render_sketch(mesh, p.camera, p.lighting, image_size, image_size).pixels;
    Eigen::Matrix2Xd points(2, losses::landmark_count);
    for (int k = 0; k < losses::landmark_count; ++k)
    {
        points.col(k) = render::project_point(mesh.positions.col(asset.landmark_indices[k]), p.camera);
    }
    pair.landmarks = losses::LandmarkSet(points);
    pair.params = p;
    return pair;
}

} // namespace dataset
} // namespace sk13
