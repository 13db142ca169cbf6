/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/render/camera.hpp
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

#ifndef SK13_RENDER_CAMERA_HPP
#define SK13_RENDER_CAMERA_HPP

#include "Eigen/Core"

namespace sk13 {
namespace render {

/**
 * Weak-perspective camera: p = s * Pi * v + t with Pi = [[1,0,0],[0,1,0]].
 *
 * Image coordinates are pixels with y pointing down; the camera looks along +z,
 * so smaller z is nearer.
 */
struct CameraParams
{
    double scale = 1.0;
    Eigen::Vector2d translation = Eigen::Vector2d::Zero();

    void validate() const;

    /// The same view expressed for an image resized by `factor`.
    CameraParams rescaled(double factor) const { return {scale * factor, translation * factor}; }

    friend bool operator==(const CameraParams& a, const CameraParams& b)
    {
        return a.scale == b.scale && a.translation == b.translation;
    }
};

/// Projects every column of `positions` (3 x N) to pixel coordinates (2 x N).
Eigen::Matrix2Xd project_vertices(const Eigen::Matrix3Xd& positions, const CameraParams& camera);

inline Eigen::Vector2d project_point(const Eigen::Vector3d& v, const CameraParams& camera)
{
    return camera.scale * v.head<2>() + camera.translation;
}

} // namespace render
} // namespace sk13

#endif // SK13_RENDER_CAMERA_HPP
