/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/render/rasterizer.cpp
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
#include "sk13/render/rasterizer.hpp"
#include "sk13/core/error.hpp"
#include "sk13/dataset/edges.hpp"
#include "sk13/render/sh_lighting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sk13 {
namespace render {

namespace {

// Twice the signed area of (a, b, p); positive when p is on the interior side of a
// positively oriented edge a -> b.
inline double edge_function(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double px, double py)
{
    return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
}

inline bool is_top_left(const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    const double dx = b.x() - a.x();
    const double dy = b.y() - a.y();
    return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

// floor() for values well inside the int range, without a libm call.
inline int floor_int(double v)
{
    const int t = static_cast<int>(v);
    return t - (v < static_cast<double>(t) ? 1 : 0);
}

inline bool edge_covers(double w, bool top_left) { return w > 0.0 || (w == 0.0 && top_left); }

void require_size(int width, int height)
{
    if (width <= 0 || height <= 0)
    {
        throw ValidationError("image size", "width and height must be positive");
    }
}

} // namespace

Coverage rasterize_coverage(const Eigen::Matrix2Xd& projected, std::span<const double> depths,
                            std::span<const model::Triangle> triangles, int width, int height)
{
    require_size(width, height);
    if (static_cast<Eigen::Index>(depths.size()) != projected.cols())
    {
        throw ValidationError("depths", "one depth per projected vertex is required");
    }
    const std::size_t pixel_count = static_cast<std::size_t>(width) * height;
    Coverage cov;
    cov.width = width;
    cov.height = height;
    cov.triangle.assign(pixel_count, -1);
    cov.barycentric.assign(pixel_count, {0.0, 0.0, 0.0});
    cov.depth.assign(pixel_count, std::numeric_limits<double>::infinity());

    for (std::size_t index = 0; index < triangles.size(); ++index)
    {
        const model::Triangle& t = triangles[index];
        // Vertex slots after orientation fix-up; slot k carries original corner order[k].
        std::array<int, 3> order = {0, 1, 2};
        Eigen::Vector2d v[3] = {projected.col(t[0]), projected.col(t[1]), projected.col(t[2])};
        if (!v[0].allFinite() || !v[1].allFinite() || !v[2].allFinite())
        {
            continue;
        }
        double area = edge_function(v[0], v[1], v[2].x(), v[2].y());
        if (area == 0.0 || !std::isfinite(area))
        {
            continue;
        }
        if (area < 0.0)
        {
            std::swap(v[1], v[2]);
            std::swap(order[1], order[2]);
            area = -area;
        }
        const double z[3] = {depths[t[order[0]]], depths[t[order[1]]], depths[t[order[2]]]};
        const bool top_left[3] = {is_top_left(v[1], v[2]), is_top_left(v[2], v[0]), is_top_left(v[0], v[1])};

        const double min_x = std::min({v[0].x(), v[1].x(), v[2].x()});
        const double max_x = std::max({v[0].x(), v[1].x(), v[2].x()});
        const double min_y = std::min({v[0].y(), v[1].y(), v[2].y()});
        const double max_y = std::max({v[0].y(), v[1].y(), v[2].y()});
        const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(max_x - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(max_y - 0.5)));

        // Same arithmetic as edge_function, with the row-constant products hoisted.
        const double ex[3] = {v[2].x() - v[1].x(), v[0].x() - v[2].x(), v[1].x() - v[0].x()};
        const double ey[3] = {v[2].y() - v[1].y(), v[0].y() - v[2].y(), v[1].y() - v[0].y()};
        const Eigen::Vector2d* origin[3] = {&v[1], &v[2], &v[0]};
        for (int y = y0; y <= y1; ++y)
        {
            const double py = y + 0.5;
            double row[3];
            for (int k = 0; k < 3; ++k)
            {
                row[k] = ex[k] * (py - origin[k]->y());
            }
            // Conservative span from the edge crossings; pixels outside it fail some edge
            // test by a margin of at least a pixel, pixels inside still get the exact test.
            int xa = x0;
            int xb = x1;
            for (int k = 0; k < 3; ++k)
            {
                if (ey[k] == 0.0)
                {
                    continue;
                }
                const double crossing = origin[k]->x() + row[k] / ey[k] - 0.5;
                if (!std::isfinite(crossing) || std::abs(crossing) > 1e9)
                {
                    continue;
                }
                if (ey[k] > 0.0)
                {
                    xb = std::min(xb, floor_int(crossing) + 1);
                }
                else
                {
                    xa = std::max(xa, -floor_int(-crossing) - 1);
                }
            }
            for (int x = xa; x <= xb; ++x)
            {
                const double px = x + 0.5;
                const double w0 = row[0] - ey[0] * (px - v[1].x());
                if (!edge_covers(w0, top_left[0]))
                {
                    continue;
                }
                const double w1 = row[1] - ey[1] * (px - v[2].x());
                if (!edge_covers(w1, top_left[1]))
                {
                    continue;
                }
                const double w2 = row[2] - ey[2] * (px - v[0].x());
                if (!edge_covers(w2, top_left[2]))
                {
                    continue;
                }
                const double l0 = w0 / area;
                const double l1 = w1 / area;
                const double l2 = w2 / area;
                const double depth = l0 * z[0] + l1 * z[1] + l2 * z[2];
                const std::size_t p = static_cast<std::size_t>(y) * width + x;
                if (depth < cov.depth[p])
                {
                    cov.depth[p] = depth;
                    cov.triangle[p] = static_cast<int>(index);
                    std::array<double, 3> bary{};
                    bary[order[0]] = l0;
                    bary[order[1]] = l1;
                    bary[order[2]] = l2;
                    cov.barycentric[p] = bary;
                }
            }
        }
    }
    return cov;
}

std::size_t RenderedImage::mask_count() const
{
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::vector<std::array<double, 9>> pixel_sh_basis(const Coverage& coverage, std::span<const model::Triangle> triangles,
                                                  const Eigen::Matrix3Xd& normals)
{
    std::vector<std::array<double, 9>> basis(coverage.triangle.size());
    for (std::size_t p = 0; p < coverage.triangle.size(); ++p)
    {
        const int index = coverage.triangle[p];
        if (index < 0)
        {
            continue;
        }
        const model::Triangle& t = triangles[index];
        const auto& b = coverage.barycentric[p];
        Eigen::Vector3d n = b[0] * normals.col(t[0]) + b[1] * normals.col(t[1]) + b[2] * normals.col(t[2]);
        const double length = n.norm();
        n = length > 0.0 ? Eigen::Vector3d(n / length) : Eigen::Vector3d(0.0, 0.0, -1.0);
        basis[p] = sh_basis(n);
    }
    return basis;
}

RenderedImage shade_with_basis(const Coverage& coverage, std::span<const model::Triangle> triangles,
                               std::span<const std::array<double, 9>> basis, const Eigen::Matrix3Xd& colors,
                               const Eigen::Matrix<double, 27, 1>& lighting)
{
    if (basis.size() != coverage.triangle.size())
    {
        throw ValidationError("basis", "one SH basis per pixel is required");
    }
    RenderedImage out;
    out.pixels = Image(coverage.width, coverage.height, 3, 1.0);
    out.mask.assign(coverage.triangle.size(), 0);
    out.depth = coverage.depth;
    for (std::size_t p = 0; p < coverage.triangle.size(); ++p)
    {
        const int index = coverage.triangle[p];
        if (index < 0)
        {
            continue;
        }
        const model::Triangle& t = triangles[index];
        const auto& b = coverage.barycentric[p];
        const Eigen::Vector3d albedo = b[0] * colors.col(t[0]) + b[1] * colors.col(t[1]) + b[2] * colors.col(t[2]);
        const Eigen::Vector3d rgb = sh_irradiance_unclamped(basis[p], albedo, lighting);
        for (int c = 0; c < 3; ++c)
        {
            out.pixels.pixels[3 * p + c] = std::clamp(rgb[c], 0.0, 1.0);
        }
        out.mask[p] = 1;
    }
    return out;
}

RenderedImage shade_coverage(const Coverage& coverage, std::span<const model::Triangle> triangles,
                             const Eigen::Matrix3Xd& normals, const Eigen::Matrix3Xd& colors,
                             const Eigen::Matrix<double, 27, 1>& lighting)
{
    return shade_with_basis(coverage, triangles, pixel_sh_basis(coverage, triangles, normals), colors, lighting);
}

RenderedImage rasterize(const model::Mesh& mesh, const CameraParams& camera,
                        const Eigen::Matrix<double, 27, 1>& lighting, int width, int height)
{
    require_size(width, height);
    if (!mesh.positions.allFinite())
    {
        throw ValidationError("mesh", "positions must be finite");
    }
    const Eigen::Matrix2Xd projected = project_vertices(mesh.positions, camera);
    const Eigen::VectorXd depths = mesh.positions.row(2).transpose();
    const Coverage coverage = rasterize_coverage(projected, std::span(depths.data(), depths.size()), mesh.triangles,
                                                 width, height);
    return shade_coverage(coverage, mesh.triangles, mesh.normals, mesh.colors, lighting);
}

Image sketch_from_shaded(const Image& shaded_gray, std::span<const std::uint8_t> mask)
{
    if (shaded_gray.channels != 1 || mask.size() != shaded_gray.pixel_count())
    {
        throw ValidationError("shaded", "expected a grayscale image and a matching mask");
    }
    const Image edges = dataset::edge_map(shaded_gray);
    Image sketch(shaded_gray.width, shaded_gray.height, 1, 1.0);
    for (std::size_t p = 0; p < mask.size(); ++p)
    {
        if (mask[p])
        {
            sketch.pixels[p] = 1.0 - edges.pixels[p];
        }
    }
    return sketch;
}

RenderedImage render_sketch(const model::Mesh& mesh, const CameraParams& camera,
                            const Eigen::Matrix<double, 27, 1>& lighting, int width, int height, RenderMode mode)
{
    RenderedImage rendered = rasterize(mesh, camera, lighting, width, height);
    rendered.pixels = to_grayscale(rendered.pixels);
    if (mode == RenderMode::sketch)
    {
        rendered.pixels = sketch_from_shaded(rendered.pixels, rendered.mask);
    }
    return rendered;
}

} // namespace render
} // namespace sk13
