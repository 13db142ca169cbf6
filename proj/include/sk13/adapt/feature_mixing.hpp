/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/adapt/feature_mixing.hpp
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

#ifndef SK13_ADAPT_FEATURE_MIXING_HPP
#define SK13_ADAPT_FEATURE_MIXING_HPP

#include "sk13/core/image.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace sk13 {
namespace adapt {

/// Channel-major C x H x W feature values.
struct FeatureMap
{
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;

    FeatureMap() = default;
    FeatureMap(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w), values(static_cast<std::size_t>(c) * h * w, fill)
    {
    }

    std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
    double& at(int c, int y, int x) { return values[c * plane() + static_cast<std::size_t>(y) * width + x]; }
    double at(int c, int y, int x) const { return values[c * plane() + static_cast<std::size_t>(y) * width + x]; }

    /// At least one channel, H * W >= 2, finite values of the right count.
    void validate() const;
};

constexpr double std_floor = 1e-6;

struct ChannelStats
{
    std::vector<double> mean;
    /// Population standard deviation over the spatial dimensions, never below std_floor.
    std::vector<double> std;
};

ChannelStats channel_stats(const FeatureMap& x);

/**
 * Re-normalizes each channel of `x` to the blend of both maps' statistics:
 * (x - mu) / sigma * (lambda sigma + (1 - lambda) sigma') + (lambda mu + (1 - lambda) mu').
 * The spatial sizes may differ; the output has the shape of `x`.
 */
FeatureMap mix_feature_stats(const FeatureMap& x, const FeatureMap& x_mix, double lambda);

struct MixConfig
{
    /// Shape a of the symmetric Beta(a, a) the mixing weight is drawn from.
    double beta_param = 0.1;
    int layer = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One draw from Beta(a, a) as X / (X + Y) with X, Y ~ Gamma(a, 1).
double sample_lambda(const MixConfig& cfg, std::mt19937_64& rng);

constexpr int max_feature_layer = 3;

/**
 * Fixed random feature extractor: up to three 3x3 convolutions (stride 2, zero padding 1,
 * ReLU) with 8, 16 and 32 output channels, weights drawn from the seed. Layer 0 is the
 * grayscale input as a one-channel map; each layer maps H to ceil(H / 2).
 */
FeatureMap extract_features(const Image& image, int layer, std::uint64_t seed);

/// Tiles the channels of a map into a grayscale grid, each channel min-max normalized.
Image feature_grid(const FeatureMap& map);

} // namespace adapt
} // namespace sk13

#endif // SK13_ADAPT_FEATURE_MIXING_HPP
