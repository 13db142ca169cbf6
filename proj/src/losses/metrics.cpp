/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/losses/metrics.cpp
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
#include "sk13/losses/metrics.hpp"
#include "sk13/core/error.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace sk13 {
namespace losses {

namespace {

constexpr int ssim_window = 11;
constexpr double ssim_sigma = 1.5;
constexpr double ssim_c1 = 0.01 * 0.01;
constexpr double ssim_c2 = 0.03 * 0.03;
constexpr double gmsd_c = 0.0026;

void require_pair(const Image& a, const Image& b, int min_side)
{
    if (a.channels != 1 || b.channels != 1)
    {
        throw ValidationError("image", "metrics expect grayscale images");
    }
    if (a.width != b.width || a.height != b.height)
    {
        throw ValidationError("image", "metric inputs differ in size");
    }
    if (a.width < min_side || a.height < min_side)
    {
        throw ValidationError("image", "too small for the metric window");
    }
}

std::array<double, ssim_window> gaussian_taps()
{
    std::array<double, ssim_window> taps{};
    double sum = 0.0;
    const int half = ssim_window / 2;
    for (int i = 0; i < ssim_window; ++i)
    {
        const double d = i - half;
        taps[i] = std::exp(-d * d / (2.0 * ssim_sigma * ssim_sigma));
        sum += taps[i];
    }
    for (double& t : taps)
    {
        t /= sum;
    }
    return taps;
}

// Separable "valid" filtering: output is (w - 10) x (h - 10).
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h,
                                 const std::array<double, ssim_window>& taps)
{
    const int ow = w - ssim_window + 1;
    const int oh = h - ssim_window + 1;
    std::vector<double> horizontal(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
    {
        for (int x = 0; x < ow; ++x)
        {
            double s = 0.0;
            for (int k = 0; k < ssim_window; ++k)
            {
                s += taps[k] * in[static_cast<std::size_t>(y) * w + x + k];
            }
            horizontal[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
    {
        for (int x = 0; x < ow; ++x)
        {
            double s = 0.0;
            for (int k = 0; k < ssim_window; ++k)
            {
                s += taps[k] * horizontal[static_cast<std::size_t>(y + k) * ow + x];
            }
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

Image prewitt_magnitude(const Image& image)
{
    Image m(image.width, image.height, 1);
    for (int y = 0; y < image.height; ++y)
    {
        for (int x = 0; x < image.width; ++x)
        {
            double gx = 0.0;
            double gy = 0.0;
            for (int d = -1; d <= 1; ++d)
            {
                gx += image.clamped(x - 1, y + d) - image.clamped(x + 1, y + d);
                gy += image.clamped(x + d, y - 1) - image.clamped(x + d, y + 1);
            }
            gx /= 3.0;
            gy /= 3.0;
            m.at(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return m;
}

} // namespace

double ssim(const Image& a, const Image& b)
{
    require_pair(a, b, ssim_window);
    const int w = a.width;
    const int h = a.height;
    const auto taps = gaussian_taps();
    std::vector<double> aa(a.pixels.size()), bb(a.pixels.size()), ab(a.pixels.size());
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
    {
        aa[i] = a.pixels[i] * a.pixels[i];
        bb[i] = b.pixels[i] * b.pixels[i];
        ab[i] = a.pixels[i] * b.pixels[i];
    }
    const auto mu_a = filter_valid(a.pixels, w, h, taps);
    const auto mu_b = filter_valid(b.pixels, w, h, taps);
    const auto e_aa = filter_valid(aa, w, h, taps);
    const auto e_bb = filter_valid(bb, w, h, taps);
    const auto e_ab = filter_valid(ab, w, h, taps);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i)
    {
        const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
        const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
        const double cov = e_ab[i] - mu_a[i] * mu_b[i];
        total += ((2.0 * mu_a[i] * mu_b[i] + ssim_c1) * (2.0 * cov + ssim_c2)) /
                 ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + ssim_c1) * (var_a + var_b + ssim_c2));
    }
    return total / static_cast<double>(mu_a.size());
}

double gmsd(const Image& a, const Image& b)
{
    require_pair(a, b, 1);
    const Image ma = prewitt_magnitude(a);
    const Image mb = prewitt_magnitude(b);
    const std::size_t n = ma.pixels.size();
    std::vector<double> gms(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double x = ma.pixels[i];
        const double y = mb.pixels[i];
        gms[i] = (2.0 * x * y + gmsd_c) / (x * x + y * y + gmsd_c);
        mean += gms[i];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double g : gms)
    {
        var += (g - mean) * (g - mean);
    }
    return std::sqrt(var / static_cast<double>(n));
}

} // namespace losses
} // namespace sk13
