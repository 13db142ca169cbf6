/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/adapt/feature_mixing.cpp
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
#include "sk13/adapt/feature_mixing.hpp"
#include "sk13/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sk13 {
namespace adapt {

void FeatureMap::validate() const
{
    if (channels < 1 || height < 1 || width < 1)
    {
        throw ValidationError("feature_map", "dimensions must be positive");
    }
    if (plane() < 2)
    {
        throw ValidationError("feature_map", "needs at least two spatial samples per channel");
    }
    if (values.size() != static_cast<std::size_t>(channels) * plane())
    {
        throw ValidationError("feature_map", "value count does not match C x H x W");
    }
    for (double v : values)
    {
        if (!std::isfinite(v))
        {
            throw ValidationError("feature_map", "values must be finite");
        }
    }
}

ChannelStats channel_stats(const FeatureMap& x)
{
    x.validate();
    ChannelStats stats;
    const std::size_t n = x.plane();
    for (int c = 0; c < x.channels; ++c)
    {
        const double* v = x.values.data() + c * n;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            sum += v[i];
        }
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            sq += (v[i] - mean) * (v[i] - mean);
        }
        stats.mean.push_back(mean);
        stats.std.push_back(std::max(std::sqrt(sq / static_cast<double>(n)), std_floor));
    }
    return stats;
}

FeatureMap mix_feature_stats(const FeatureMap& x, const FeatureMap& x_mix, double lambda)
{
    if (x.channels != x_mix.channels)
    {
        throw ValidationError("x_mix", "channel count " + std::to_string(x_mix.channels) + " does not match " +
                                           std::to_string(x.channels));
    }
    if (!(lambda >= 0.0 && lambda <= 1.0))
    {
        throw ValidationError("lambda", "must lie in [0, 1]");
    }
    const ChannelStats a = channel_stats(x);
    const ChannelStats b = channel_stats(x_mix);
    FeatureMap out = x;
    const std::size_t n = x.plane();
    for (int c = 0; c < x.channels; ++c)
    {
        const double sigma = lambda * a.std[c] + (1.0 - lambda) * b.std[c];
        const double mu = lambda * a.mean[c] + (1.0 - lambda) * b.mean[c];
        double* v = out.values.data() + c * n;
        for (std::size_t i = 0; i < n; ++i)
        {
            v[i] = (v[i] - a.mean[c]) / a.std[c] * sigma + mu;
        }
    }
    return out;
}

void MixConfig::validate() const
{
    if (!(beta_param > 0.0) || !std::isfinite(beta_param))
    {
        throw ValidationError("beta_param", "must be positive");
    }
    if (layer < 0 || layer > max_feature_layer)
    {
        throw ValidationError("layer", "must lie in [0, 3]");
    }
}

double sample_lambda(const MixConfig& cfg, std::mt19937_64& rng)
{
    cfg.validate();
    std::gamma_distribution<double> gamma(cfg.beta_param, 1.0);
    const double x = gamma(rng);
    const double y = gamma(rng);
    // With tiny shapes both draws can underflow to zero; the distribution is symmetric.
    if (x + y == 0.0)
    {
        return 0.5;
    }
    return x / (x + y);
}

namespace {

FeatureMap conv_layer(const FeatureMap& in, int out_channels, std::mt19937_64& rng)
{
    const int h = (in.height + 1) / 2;
    const int w = (in.width + 1) / 2;
    const double fan_in = 9.0 * in.channels;
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
    std::vector<double> weights(static_cast<std::size_t>(out_channels) * in.channels * 9);
    for (double& v : weights)
    {
        v = normal(rng);
    }
    FeatureMap out(out_channels, h, w);
    for (int o = 0; o < out_channels; ++o)
    {
        for (int y = 0; y < h; ++y)
        {
            for (int x = 0; x < w; ++x)
            {
                double acc = 0.0;
                for (int c = 0; c < in.channels; ++c)
                {
                    const double* k = weights.data() + (static_cast<std::size_t>(o) * in.channels + c) * 9;
                    for (int dy = 0; dy < 3; ++dy)
                    {
                        const int sy = 2 * y + dy - 1;
                        if (sy < 0 || sy >= in.height)
                        {
                            continue;
                        }
                        for (int dx = 0; dx < 3; ++dx)
                        {
                            const int sx = 2 * x + dx - 1;
                            if (sx >= 0 && sx < in.width)
                            {
                                acc += k[dy * 3 + dx] * in.at(c, sy, sx);
                            }
                        }
                    }
                }
                out.at(o, y, x) = std::max(0.0, acc);
            }
        }
    }
    return out;
}

} // namespace

FeatureMap extract_features(const Image& image, int layer, std::uint64_t seed)
{
    if (layer < 0 || layer > max_feature_layer)
    {
        throw ValidationError("layer", "must lie in [0, 3]");
    }
    if (image.empty())
    {
        throw ValidationError("image", "image is empty");
    }
    const Image gray = to_grayscale(image);
    FeatureMap map(1, gray.height, gray.width);
    map.values = gray.pixels;
    std::mt19937_64 rng(seed);
    const int widths[] = {8, 16, 32};
    for (int l = 0; l < layer; ++l)
    {
        map = conv_layer(map, widths[l], rng);
    }
    return map;
}

Image feature_grid(const FeatureMap& map)
{
    map.validate();
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(map.channels))));
    const int rows = (map.channels + cols - 1) / cols;
    Image grid(cols * map.width + (cols - 1), rows * map.height + (rows - 1), 1, 1.0);
    for (int c = 0; c < map.channels; ++c)
    {
        const auto first = map.values.begin() + static_cast<std::ptrdiff_t>(c * map.plane());
        const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(map.plane()));
        const double range = *hi - *lo;
        const int ox = (c % cols) * (map.width + 1);
        const int oy = (c / cols) * (map.height + 1);
        for (int y = 0; y < map.height; ++y)
        {
            for (int x = 0; x < map.width; ++x)
            {
                grid.at(ox + x, oy + y, 0) = range > 0.0 ? (map.at(c, y, x) - *lo) / range : 0.5;
            }
        }
    }
    return grid;
}

} // namespace adapt
} // namespace sk13
