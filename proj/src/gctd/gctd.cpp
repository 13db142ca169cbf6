/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/gctd/gctd.cpp
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
#include "sk13/gctd/gctd.hpp"
#include "sk13/core/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace sk13 {
namespace gctd {

namespace {

constexpr int histogram_bins = 256;

void require_grayscale(const Image& image)
{
    if (image.empty() || image.channels != 1)
    {
        throw ValidationError("image", "expected a non-empty grayscale image");
    }
}

int bin_of(double v)
{
    return std::clamp(static_cast<int>(std::floor(v * histogram_bins)), 0, histogram_bins - 1);
}

} // namespace

void GctdConfig::validate() const
{
    if (kernel_radius < 0)
    {
        throw ValidationError("kernel_radius", "must be non-negative");
    }
    if (!(sigma_spatial > 0.0))
    {
        throw ValidationError("sigma_spatial", "must be positive");
    }
    if (!(sigma_range_base > 0.0))
    {
        throw ValidationError("sigma_range_base", "must be positive");
    }
    if (variance_window < 3 || variance_window % 2 == 0)
    {
        throw ValidationError("variance_window", "must be odd and at least 3");
    }
    if (!(adapt_strength >= 0.0))
    {
        throw ValidationError("adapt_strength", "must be non-negative");
    }
}

Image bilateral_filter(const Image& image, const GctdConfig& config, const std::optional<Image>& range_map)
{
    config.validate();
    require_grayscale(image);
    if (range_map)
    {
        if (range_map->width != image.width || range_map->height != image.height || range_map->channels != 1)
        {
            throw ValidationError("range_map", "must match the image size");
        }
        for (double s : range_map->pixels)
        {
            if (!(s > 0.0))
            {
                throw ValidationError("range_map", "sigma must be strictly positive everywhere");
            }
        }
    }
    const int r = config.kernel_radius;
    const int side = 2 * r + 1;
    std::vector<double> spatial(static_cast<std::size_t>(side) * side);
    for (int b = -r; b <= r; ++b)
    {
        for (int a = -r; a <= r; ++a)
        {
            spatial[(b + r) * side + (a + r)] =
                std::exp(-(a * a + b * b) / (2.0 * config.sigma_spatial * config.sigma_spatial));
        }
    }

    Image out(image.width, image.height, 1);
    for (int y = 0; y < image.height; ++y)
    {
        for (int x = 0; x < image.width; ++x)
        {
            const double center = image.at(x, y);
            const double sigma_r = range_map ? range_map->at(x, y) : config.sigma_range_base;
            const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_r * sigma_r);
            double weighted = 0.0;
            double total = 0.0;
            for (int b = -r; b <= r; ++b)
            {
                for (int a = -r; a <= r; ++a)
                {
                    const double f = image.clamped(x + a, y + b);
                    const double diff = f - center;
                    const double w = spatial[(b + r) * side + (a + r)] * std::exp(-diff * diff * inv_two_sigma_sq);
                    weighted += w * diff;
                    total += w;
                }
            }
            // Offsets from the center keep flat regions exact. The center weight is 1,
            // so total >= 1.
            out.at(x, y) = center + weighted / total;
        }
    }
    return out;
}

Image adaptive_range_map(const Image& image, const GctdConfig& config)
{
    config.validate();
    require_grayscale(image);
    const double n = static_cast<double>(image.pixel_count());
    double mean = 0.0;
    for (double v : image.pixels)
    {
        mean += v;
    }
    mean /= n;
    double global_var = 0.0;
    for (double v : image.pixels)
    {
        global_var += (v - mean) * (v - mean);
    }
    global_var = std::max(global_var / n, 1e-8);

    const int half = config.variance_window / 2;
    const double window_size = static_cast<double>(config.variance_window * config.variance_window);
    Image sigma(image.width, image.height, 1, config.sigma_range_base);
    if (config.adapt_strength == 0.0)
    {
        return sigma;
    }
    for (int y = 0; y < image.height; ++y)
    {
        for (int x = 0; x < image.width; ++x)
        {
            double local_mean = 0.0;
            for (int b = -half; b <= half; ++b)
            {
                for (int a = -half; a <= half; ++a)
                {
                    local_mean += image.clamped(x + a, y + b);
                }
            }
            local_mean /= window_size;
            double local_var = 0.0;
            for (int b = -half; b <= half; ++b)
            {
                for (int a = -half; a <= half; ++a)
                {
                    const double d = image.clamped(x + a, y + b) - local_mean;
                    local_var += d * d;
                }
            }
            local_var /= window_size;
            sigma.at(x, y) = config.sigma_range_base / (1.0 + config.adapt_strength * local_var / global_var);
        }
    }
    return sigma;
}

Image equalize(const Image& image)
{
    require_grayscale(image);
    std::array<std::size_t, histogram_bins> histogram{};
    for (double v : image.pixels)
    {
        ++histogram[bin_of(v)];
    }
    const auto occupied = std::count_if(histogram.begin(), histogram.end(), [](std::size_t c) { return c > 0; });
    if (occupied <= 1)
    {
        return image;
    }
    std::array<double, histogram_bins> cdf{};
    std::size_t running = 0;
    const double total = static_cast<double>(image.pixel_count());
    for (int k = 0; k < histogram_bins; ++k)
    {
        running += histogram[k];
        cdf[k] = static_cast<double>(running) / total;
    }
    Image out(image.width, image.height, 1);
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
    {
        out.pixels[i] = cdf[bin_of(image.pixels[i])];
    }
    return out;
}

Image enhance(const Image& image, const GctdConfig& config)
{
    const Image gray = to_grayscale(image);
    Image out = equalize(bilateral_filter(gray, config, adaptive_range_map(gray, config)));
    clamp_unit(out);
    return out;
}

} // namespace gctd
} // namespace sk13
