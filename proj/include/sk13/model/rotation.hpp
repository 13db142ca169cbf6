/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/model/rotation.hpp
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

#ifndef SK13_MODEL_ROTATION_HPP
#define SK13_MODEL_ROTATION_HPP

#include "Eigen/Core"

#include <array>

namespace sk13 {
namespace model {

/// Rotation matrix of an axis-angle vector (Rodrigues' formula).
Eigen::Matrix3d axis_angle_to_matrix(const Eigen::Vector3d& axis_angle);

/**
 * Partial derivatives dR/dw_k, k = 0..2, of the axis-angle rotation R(w).
 *
 * Uses the closed form of Gallego & Yezzi (2015),
 *   dR/dw_k = (w_k [w]x + [w x (I - R) e_k]x) R / |w|^2,
 * and its second-order series around w = 0 where the closed form cancels badly.
 */
std::array<Eigen::Matrix3d, 3> axis_angle_derivatives(const Eigen::Vector3d& axis_angle);

/// Cross-product matrix [v]x.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

} // namespace model
} // namespace sk13

#endif // SK13_MODEL_ROTATION_HPP
