/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/dataset/edges.cpp
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
#include "sk13/dataset/edges.hpp"
#include "sk13/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sk13 {
namespace dataset {

Image sobel_magnitude(const Image& input)
{
    if (input.empty())
    {
        throw ValidationError("image", "edge extraction needs a non-empty image");
    }
    const Image image = to_grayscale(input);
    const int w = image.width;
    const int h = image.height;
    Image magnitude(w, h, 1);
    for (int y = 0; y < h; ++y)
    {
        const int ym = std::max(y - 1, 0);
        const int yp = std::min(y + 1, h - 1);
        const double* row_m = &image.pixels[static_cast<std::size_t>(ym) * w];
        const double* row_0 = &image.pixels[static_cast<std::size_t>(y) * w];
        const double* row_p = &image.pixels[static_cast<std::size_t>(yp) * w];
        for (int x = 0; x < w; ++x)
        {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            const double gx = (row_m[xp] + 2.0 * row_0[xp] + row_p[xp]) - (row_m[xm] + 2.0 * row_0[xm] + row_p[xm]);
            const double gy = (row_p[xm] + 2.0 * row_p[x] + row_p[xp]) - (row_m[xm] + 2.0 * row_m[x] + row_m[xp]);
            magnitude.pixels[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
        }
    }
    return magnitude;
}

Image edge_map(const Image& image)
{
    Image magnitude = sobel_magnitude(image);
    std::vector<double> sorted = magnitude.pixels;
    const std::size_t rank = static_cast<std::size_t>(std::floor(0.99 * static_cast<double>(sorted.size() - 1)));
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank), sorted.end());
    double scale = sorted[rank];
    if (scale <= 0.0)
    {
        scale = *std::max_element(magnitude.pixels.begin(), magnitude.pixels.end());
    }
    if (scale <= 0.0)
    {
        std::fill(magnitude.pixels.begin(), magnitude.pixels.end(), 0.0);
        return magnitude;
    }
    for (double& v : magnitude.pixels)
    {
        v = std::min(v / scale, 1.0);
    }
    return magnitude;
}

Image synthesize_sketch(const Image& photo)
{
    Image sketch = edge_map(photo);
    for (double& v : sketch.pixels)
    {
        v = 1.0 - v;
    }
    return sketch;
}

} // namespace dataset
} // namespace sk13
