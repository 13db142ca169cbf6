/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: tests/render_oracle.hpp
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

#ifndef SK13_TESTS_RENDER_ORACLE_HPP
#define SK13_TESTS_RENDER_ORACLE_HPP

#include "sk13/model/head_model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace sk13::testing {

/**
 * Per-pixel ownership by testing every triangle at every pixel center: inside when
 * all three edge functions of the counter-clockwise (in y-down pixels, positive
 * area) triangle are positive, or zero on a top or left edge. Nearest depth wins,
 * earlier triangles win ties.
 */
inline std::vector<int> brute_force_owner(const Eigen::Matrix2Xd& p, const std::vector<double>& z,
                                          const std::vector<model::Triangle>& tris, int width, int height)
{
    auto edge = [](double ax, double ay, double bx, double by, double px, double py) {
        return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    };
    auto top_left = [](double ax, double ay, double bx, double by) {
        return by - ay < 0.0 || (by - ay == 0.0 && bx - ax > 0.0);
    };
    std::vector<int> owner(static_cast<std::size_t>(width) * height, -1);
    std::vector<double> best(owner.size(), std::numeric_limits<double>::infinity());
    for (int y = 0; y < height; ++y)
    {
        for (int x = 0; x < width; ++x)
        {
            const double px = x + 0.5;
            const double py = y + 0.5;
            for (std::size_t t = 0; t < tris.size(); ++t)
            {
                int a = tris[t][0];
                int b = tris[t][1];
                int c = tris[t][2];
                double area = edge(p(0, a), p(1, a), p(0, b), p(1, b), p(0, c), p(1, c));
                if (area == 0.0)
                {
                    continue;
                }
                if (area < 0.0)
                {
                    std::swap(b, c);
                    area = -area;
                }
                const int corner[3] = {a, b, c};
                double w[3];
                bool inside = true;
                for (int k = 0; k < 3 && inside; ++k)
                {
                    const int from = corner[(k + 1) % 3];
                    const int to = corner[(k + 2) % 3];
                    w[k] = edge(p(0, from), p(1, from), p(0, to), p(1, to), px, py);
                    inside = w[k] > 0.0 || (w[k] == 0.0 && top_left(p(0, from), p(1, from), p(0, to), p(1, to)));
                }
                if (!inside)
                {
                    continue;
                }
                const double depth = w[0] / area * z[a] + w[1] / area * z[b] + w[2] / area * z[c];
                const std::size_t idx = static_cast<std::size_t>(y) * width + x;
                if (depth < best[idx])
                {
                    best[idx] = depth;
                    owner[idx] = static_cast<int>(t);
                }
            }
        }
    }
    return owner;
}

struct RandomScene
{
    Eigen::Matrix2Xd projected;
    std::vector<double> depths;
    std::vector<model::Triangle> triangles;
};

/**
 * Random triangles inside a size x size image. A third of the vertices are snapped
 * to pixel centers or pixel corners so edges pass exactly through sample points.
 */
inline RandomScene random_scene(std::uint64_t seed, int size, int triangle_count)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-4.0, size + 4.0);
    std::uniform_real_distribution<double> depth(-10.0, 10.0);
    std::uniform_int_distribution<int> snap(0, 2);
    RandomScene scene;
    const int vertex_count = 3 * triangle_count;
    scene.projected.resize(2, vertex_count);
    for (int v = 0; v < vertex_count; ++v)
    {
        double x = pos(rng);
        double y = pos(rng);
        const int mode = snap(rng);
        if (mode == 1)
        {
            x = std::floor(x) + 0.5;
            y = std::floor(y) + 0.5;
        }
        else if (mode == 2)
        {
            x = std::floor(x);
            y = std::floor(y);
        }
        scene.projected(0, v) = x;
        scene.projected(1, v) = y;
        scene.depths.push_back(depth(rng));
    }
    std::uniform_int_distribution<int> pick(0, vertex_count - 1);
    for (int t = 0; t < triangle_count; ++t)
    {
        // Mostly fresh vertices, sometimes shared ones so triangles abut.
        if (t > 0 && snap(rng) == 0)
        {
            scene.triangles.push_back({pick(rng), pick(rng), 3 * t + 2});
        }
        else
        {
            scene.triangles.push_back({3 * t, 3 * t + 1, 3 * t + 2});
        }
    }
    return scene;
}

} // namespace sk13::testing

#endif // SK13_TESTS_RENDER_ORACLE_HPP
