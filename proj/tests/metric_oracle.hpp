/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: tests/metric_oracle.hpp
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

#ifndef SK13_TESTS_METRIC_ORACLE_HPP
#define SK13_TESTS_METRIC_ORACLE_HPP

#include "sk13/core/image.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sk13::testing {

/**
 * SSIM straight from the definition: a full 2D Gaussian window at each valid
 * position and two-pass weighted moments.
 */
inline double ssim_oracle(const Image& a, const Image& b)
{
    const int n = 11;
    const double sigma = 1.5;
    double w[11][11];
    double total = 0.0;
    for (int j = 0; j < n; ++j)
    {
        for (int i = 0; i < n; ++i)
        {
            w[j][i] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * sigma * sigma));
            total += w[j][i];
        }
    }
    const double c1 = 1e-4;
    const double c2 = 9e-4;
    double sum = 0.0;
    int count = 0;
    for (int y = 0; y + n <= a.height; ++y)
    {
        for (int x = 0; x + n <= a.width; ++x)
        {
            double ma = 0.0;
            double mb = 0.0;
            for (int j = 0; j < n; ++j)
            {
                for (int i = 0; i < n; ++i)
                {
                    ma += w[j][i] / total * a.at(x + i, y + j);
                    mb += w[j][i] / total * b.at(x + i, y + j);
                }
            }
            double va = 0.0;
            double vb = 0.0;
            double cov = 0.0;
            for (int j = 0; j < n; ++j)
            {
                for (int i = 0; i < n; ++i)
                {
                    const double da = a.at(x + i, y + j) - ma;
                    const double db = b.at(x + i, y + j) - mb;
                    va += w[j][i] / total * da * da;
                    vb += w[j][i] / total * db * db;
                    cov += w[j][i] / total * da * db;
                }
            }
            sum += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return sum / count;
}

/// GMSD with explicit 3x3 Prewitt kernels and a two-pass standard deviation.
inline double gmsd_oracle(const Image& a, const Image& b)
{
    const double kx[3][3] = {{1, 0, -1}, {1, 0, -1}, {1, 0, -1}};
    auto magnitude = [&](const Image& im, int x, int y) {
        double gx = 0.0;
        double gy = 0.0;
        for (int j = 0; j < 3; ++j)
        {
            for (int i = 0; i < 3; ++i)
            {
                const int xx = std::clamp(x + i - 1, 0, im.width - 1);
                const int yy = std::clamp(y + j - 1, 0, im.height - 1);
                gx += kx[j][i] / 3.0 * im.at(xx, yy);
                gy += kx[i][j] / 3.0 * im.at(xx, yy);
            }
        }
        return std::sqrt(gx * gx + gy * gy);
    };
    std::vector<double> gms;
    for (int y = 0; y < a.height; ++y)
    {
        for (int x = 0; x < a.width; ++x)
        {
            const double p = magnitude(a, x, y);
            const double q = magnitude(b, x, y);
            gms.push_back((2 * p * q + 0.0026) / (p * p + q * q + 0.0026));
        }
    }
    double mean = 0.0;
    for (double g : gms)
    {
        mean += g;
    }
    mean /= gms.size();
    double var = 0.0;
    for (double g : gms)
    {
        var += (g - mean) * (g - mean);
    }
    return std::sqrt(var / gms.size());
}

/// 3x3 box blur with clamped borders.
inline Image box_blur(const Image& im)
{
    Image out(im.width, im.height, 1);
    for (int y = 0; y < im.height; ++y)
    {
        for (int x = 0; x < im.width; ++x)
        {
            double s = 0.0;
            for (int j = -1; j <= 1; ++j)
            {
                for (int i = -1; i <= 1; ++i)
                {
                    s += im.clamped(x + i, y + j);
                }
            }
            out.at(x, y) = s / 9.0;
        }
    }
    return out;
}

} // namespace sk13::testing

#endif // SK13_TESTS_METRIC_ORACLE_HPP
