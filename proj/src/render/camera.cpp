/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/render/camera.cpp
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
#include "sk13/render/camera.hpp"
#include "sk13/core/error.hpp"

#include <cmath>

namespace sk13 {
namespace render {

void CameraParams::validate() const
{
    if (!(scale > 0.0) || !std::isfinite(scale))
    {
        throw ValidationError("camera_scale", "must be a positive finite number");
    }
    if (!translation.allFinite())
    {
        throw ValidationError("camera_translation", "must be finite");
    }
}

Eigen::Matrix2Xd project_vertices(const Eigen::Matrix3Xd& positions, const CameraParams& camera)
{
    camera.validate();
    Eigen::Matrix2Xd projected(2, positions.cols());
    for (Eigen::Index i = 0; i < positions.cols(); ++i)
    {
        projected.col(i) = camera.scale * positions.col(i).head<2>() + camera.translation;
    }
    return projected;
}

} // namespace render
} // namespace sk13
