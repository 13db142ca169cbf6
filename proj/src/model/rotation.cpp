/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/model/rotation.cpp
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
#include "sk13/model/rotation.hpp"

#include "Eigen/Geometry"

#include <cmath>

namespace sk13 {
namespace model {

Eigen::Matrix3d skew(const Eigen::Vector3d& v)
{
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Eigen::Matrix3d axis_angle_to_matrix(const Eigen::Vector3d& axis_angle)
{
    const double angle = axis_angle.norm();
    const Eigen::Matrix3d k = skew(axis_angle);
    if (angle < 1e-12)
    {
        return Eigen::Matrix3d::Identity() + k;
    }
    const double a = std::sin(angle) / angle;
    const double b = (1.0 - std::cos(angle)) / (angle * angle);
    return Eigen::Matrix3d::Identity() + a * k + b * k * k;
}

std::array<Eigen::Matrix3d, 3> axis_angle_derivatives(const Eigen::Vector3d& axis_angle)
{
    std::array<Eigen::Matrix3d, 3> d;
    const double angle_sq = axis_angle.squaredNorm();
    if (angle_sq < 1e-8)
    {
        // R ~ I + [w]x + [w]x^2 / 2
        const Eigen::Matrix3d w = skew(axis_angle);
        for (int k = 0; k < 3; ++k)
        {
            const Eigen::Matrix3d e = skew(Eigen::Vector3d::Unit(k));
            d[k] = e + 0.5 * (e * w + w * e);
        }
        return d;
    }
    const Eigen::Matrix3d rotation = axis_angle_to_matrix(axis_angle);
    const Eigen::Matrix3d w = skew(axis_angle);
    const Eigen::Matrix3d i_minus_r = Eigen::Matrix3d::Identity() - rotation;
    for (int k = 0; k < 3; ++k)
    {
        const Eigen::Vector3d column = axis_angle.cross(i_minus_r.col(k));
        d[k] = (axis_angle[k] * w + skew(column)) * rotation / angle_sq;
    }
    return d;
}

} // namespace model
} // namespace sk13
