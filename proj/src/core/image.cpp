/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/core/image.cpp
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
#include "sk13/core/image.hpp"
#include "sk13/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace sk13 {

Image::Image(int width, int height, int channels, double fill)
    : width(width), height(height), channels(channels)
{
    if (width < 0 || height < 0 || channels < 1)
    {
        throw ValidationError("image", "negative size or channel count");
    }
    pixels.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

double Image::clamped(int x, int y, int c) const
{
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(x, y, c);
}

Image to_grayscale(const Image& image)
{
    if (image.channels == 1)
    {
        return image;
    }
    Image gray(image.width, image.height, 1);
    for (int y = 0; y < image.height; ++y)
    {
        for (int x = 0; x < image.width; ++x)
        {
            const double r = image.at(x, y, 0), g = image.at(x, y, 1), b = image.at(x, y, 2);
            gray.at(x, y) = (r == g && g == b) ? r : 0.299 * r + 0.587 * g + 0.114 * b;
        }
    }
    return gray;
}

Image resample_bilinear(const Image& image, int width, int height)
{
    if (image.empty() || width <= 0 || height <= 0)
    {
        throw ValidationError("image", "cannot resample an empty image");
    }
    if (width == image.width && height == image.height)
    {
        return image;
    }
    Image out(width, height, image.channels);
    const double sx = static_cast<double>(image.width) / width;
    const double sy = static_cast<double>(image.height) / height;
    for (int y = 0; y < height; ++y)
    {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x)
        {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            for (int c = 0; c < image.channels; ++c)
            {
                const double top = (1 - wx) * image.clamped(x0, y0, c) + wx * image.clamped(x0 + 1, y0, c);
                const double bottom =
                    (1 - wx) * image.clamped(x0, y0 + 1, c) + wx * image.clamped(x0 + 1, y0 + 1, c);
                out.at(x, y, c) = (1 - wy) * top + wy * bottom;
            }
        }
    }
    return out;
}

void clamp_unit(Image& image)
{
    for (double& v : image.pixels)
    {
        v = std::clamp(v, 0.0, 1.0);
    }
}

} // namespace sk13
