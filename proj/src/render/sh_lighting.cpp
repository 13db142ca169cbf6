/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/render/sh_lighting.cpp
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
#include "sk13/render/sh_lighting.hpp"
#include "sk13/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace sk13 {
namespace render {

std::array<double, 9> sh_basis(const Eigen::Vector3d& n)
{
    const double x = n.x(), y = n.y(), z = n.z();
    return {sh_dc,
            0.48860251190291992 * y,
            0.48860251190291992 * z,
            0.48860251190291992 * x,
            1.0925484305920792 * x * y,
            1.0925484305920792 * y * z,
            0.31539156525252005 * (3.0 * z * z - 1.0),
            1.0925484305920792 * x * z,
            0.54627421529603959 * (x * x - y * y)};
}

Eigen::Vector3d sh_irradiance_unclamped(const std::array<double, 9>& basis, const Eigen::Vector3d& albedo,
                                        const Eigen::Matrix<double, 27, 1>& lighting)
{
    Eigen::Vector3d out;
    for (int c = 0; c < 3; ++c)
    {
        double irradiance = 0.0;
        for (int k = 0; k < 9; ++k)
        {
            irradiance += lighting[9 * c + k] * basis[k];
        }
        out[c] = albedo[c] * irradiance;
    }
    return out;
}

Eigen::Vector3d sh_shade(const Eigen::Vector3d& normal, const Eigen::Vector3d& albedo,
                         const Eigen::Matrix<double, 27, 1>& lighting)
{
    if (!normal.allFinite() || std::abs(normal.norm() - 1.0) > 1e-3)
    {
        throw ValidationError("normal", "must be unit length");
    }
    Eigen::Vector3d out = sh_irradiance_unclamped(sh_basis(normal), albedo, lighting);
    return out.cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::Matrix<double, 27, 1> neutral_lighting()
{
    Eigen::Matrix<double, 27, 1> l = Eigen::Matrix<double, 27, 1>::Zero();
    l[0] = l[9] = l[18] = 1.0 / sh_dc;
    return l;
}

} // namespace render
} // namespace sk13
