/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/core/image.hpp
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

#ifndef SK13_CORE_IMAGE_HPP
#define SK13_CORE_IMAGE_HPP

#include <cstddef>
#include <vector>

namespace sk13 {

/**
 * A row-major raster of doubles with 1 (grayscale) or 3 (RGB, interleaved) channels.
 *
 * Sketches use the grayscale convention white paper = 1, strokes = 0.
 */
struct Image
{
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> pixels;

    Image() = default;
    Image(int width, int height, int channels = 1, double fill = 0.0);

    bool empty() const noexcept { return width == 0 || height == 0; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width) * height; }

    double& at(int x, int y, int c = 0) { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    double at(int x, int y, int c = 0) const
    {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    /// Pixel lookup with clamp-to-edge borders.
    double clamped(int x, int y, int c = 0) const;

    friend bool operator==(const Image&, const Image&) = default;
};

/// Rec. 601 luma of an RGB image; grayscale images are returned unchanged.
Image to_grayscale(const Image& image);

/// Bilinear resampling with pixel-center alignment.
Image resample_bilinear(const Image& image, int width, int height);

/// Clamps every sample to [0, 1].
void clamp_unit(Image& image);

} // namespace sk13

#endif // SK13_CORE_IMAGE_HPP
