/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/render/rasterizer.hpp
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

#ifndef SK13_RENDER_RASTERIZER_HPP
#define SK13_RENDER_RASTERIZER_HPP

#include "sk13/core/image.hpp"
#include "sk13/model/head_model.hpp"
#include "sk13/render/camera.hpp"

#include "Eigen/Core"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sk13 {
namespace render {

/**
 * Per-pixel visibility: which triangle won the depth test at each pixel center, its
 * barycentric weights and the interpolated depth. Uncovered pixels have triangle -1
 * and infinite depth.
 */
struct Coverage
{
    int width = 0;
    int height = 0;
    std::vector<int> triangle;
    std::vector<std::array<double, 3>> barycentric;
    std::vector<double> depth;
};

/**
 * Rasterizes triangles given projected 2D vertices and per-vertex depths.
 *
 * Pixel centers sit at (x + 0.5, y + 0.5). A pixel is covered when it is strictly
 * inside a triangle, or on an edge that is a top or left edge (top-left fill rule).
 * The smallest interpolated depth wins; on equal depth the lower triangle index wins.
 * Degenerate and non-finite triangles are skipped.
 */
Coverage rasterize_coverage(const Eigen::Matrix2Xd& projected, std::span<const double> depths,
                            std::span<const model::Triangle> triangles, int width, int height);

/**
 * A rendered image with its face mask (the pixels some triangle covers) and depth.
 * Background pixels are white (1.0).
 */
struct RenderedImage
{
    Image pixels;
    std::vector<std::uint8_t> mask;
    std::vector<double> depth;

    int width() const { return pixels.width; }
    int height() const { return pixels.height; }
    std::size_t mask_count() const;
};

/// SH basis of the interpolated, renormalized normal at every covered pixel (zeros elsewhere).
std::vector<std::array<double, 9>> pixel_sh_basis(const Coverage& coverage, std::span<const model::Triangle> triangles,
                                                  const Eigen::Matrix3Xd& normals);

/// Shading from precomputed per-pixel SH bases; shade_coverage is this after pixel_sh_basis.
RenderedImage shade_with_basis(const Coverage& coverage, std::span<const model::Triangle> triangles,
                               std::span<const std::array<double, 9>> basis, const Eigen::Matrix3Xd& colors,
                               const Eigen::Matrix<double, 27, 1>& lighting);

/// Shades a coverage buffer from per-vertex normals and albedo with SH lighting (RGB output).
RenderedImage shade_coverage(const Coverage& coverage, std::span<const model::Triangle> triangles,
                             const Eigen::Matrix3Xd& normals, const Eigen::Matrix3Xd& colors,
                             const Eigen::Matrix<double, 27, 1>& lighting);

/// RGB rasterization of a mesh through a weak-perspective camera.
RenderedImage rasterize(const model::Mesh& mesh, const CameraParams& camera,
                        const Eigen::Matrix<double, 27, 1>& lighting, int width, int height);

enum class RenderMode
{
    shaded,
    sketch
};

/**
 * Converts a grayscale shaded render into the sketch domain: inverted edge map
 * inside the mask, white outside.
 */
Image sketch_from_shaded(const Image& shaded_gray, std::span<const std::uint8_t> mask);

/**
 * Grayscale render. `shaded` returns the luma of the rasterization; `sketch` returns
 * sketch_from_shaded of it. The mask is the rasterizer's mask in both modes.
 */
RenderedImage render_sketch(const model::Mesh& mesh, const CameraParams& camera,
                            const Eigen::Matrix<double, 27, 1>& lighting, int width, int height,
                            RenderMode mode = RenderMode::sketch);

} // namespace render
} // namespace sk13

#endif // SK13_RENDER_RASTERIZER_HPP
