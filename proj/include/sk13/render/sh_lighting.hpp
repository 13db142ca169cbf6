/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/render/sh_lighting.hpp
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

#ifndef SK13_RENDER_SH_LIGHTING_HPP
#define SK13_RENDER_SH_LIGHTING_HPP

#include "Eigen/Core"

#include <array>

namespace sk13 {
namespace render {

/// Y_0^0 of the real SH basis.
constexpr double sh_dc = 0.28209479177387814;

/**
 * The first nine real spherical harmonics at a unit normal, in the order
 * Y00, Y1-1 (y), Y10 (z), Y11 (x), Y2-2 (xy), Y2-1 (yz), Y20, Y21 (xz), Y22.
 */
std::array<double, 9> sh_basis(const Eigen::Vector3d& normal);

/**
 * Lambertian SH shading: out_c = albedo_c * sum_k lighting[9c + k] Y_k(n), clamped to [0, 1].
 * Throws ValidationError if |normal| deviates from 1 by more than 1e-3.
 */
Eigen::Vector3d sh_shade(const Eigen::Vector3d& normal, const Eigen::Vector3d& albedo,
                         const Eigen::Matrix<double, 27, 1>& lighting);

/// Shading before clamping, without the normal check (used by the rasterizer).
Eigen::Vector3d sh_irradiance_unclamped(const std::array<double, 9>& basis, const Eigen::Vector3d& albedo,
                                        const Eigen::Matrix<double, 27, 1>& lighting);

/// White light that reproduces the albedo exactly: DC coefficient 1 / Y00 in every channel.
Eigen::Matrix<double, 27, 1> neutral_lighting();

} // namespace render
} // namespace sk13

#endif // SK13_RENDER_SH_LIGHTING_HPP
