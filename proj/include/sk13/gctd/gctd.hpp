/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/gctd/gctd.hpp
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

#ifndef SK13_GCTD_GCTD_HPP
#define SK13_GCTD_GCTD_HPP

#include "sk13/core/image.hpp"

#include <optional>

namespace sk13 {
namespace gctd {

/**
 * Settings of the contour/texture enhancement filter.
 *
 * The bilateral kernel spans (2 * kernel_radius + 1)^2 pixels with a Gaussian spatial
 * term of width sigma_spatial and a Gaussian range term whose width is
 * sigma_range_base, reduced where local variance is high:
 *   sigma_r(x, y) = sigma_range_base / (1 + adapt_strength * localvar(x, y) / globalvar).
 */
struct GctdConfig
{
    int kernel_radius = 3;
    double sigma_spatial = 2.0;
    double sigma_range_base = 0.1;
    int variance_window = 5;
    double adapt_strength = 1.0;

    void validate() const;
};

/**
 * Edge-preserving bilateral filter with clamp-to-edge borders. `range_map`, when
 * given, supplies a per-pixel range sigma (same size, strictly positive).
 */
Image bilateral_filter(const Image& image, const GctdConfig& config, const std::optional<Image>& range_map = {});

/// Per-pixel range sigma from local variance (window `variance_window`, clamped borders).
Image adaptive_range_map(const Image& image, const GctdConfig& config);

/**
 * 256-bin histogram equalization: each pixel maps to the normalized cumulative
 * histogram of its bin. An image occupying a single bin has nothing to redistribute
 * and is returned unchanged.
 */
Image equalize(const Image& image);

/// The full module: equalize(bilateral_filter(image, config, adaptive_range_map(image, config))).
Image enhance(const Image& image, const GctdConfig& config = {});

} // namespace gctd
} // namespace sk13

#endif // SK13_GCTD_GCTD_HPP
