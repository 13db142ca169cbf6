/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: tests/test_render.cpp
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
#include "doctest.h"
#include "render_oracle.hpp"
#include "test_support.hpp"

#include "sk13/core/error.hpp"
#include "sk13/dataset/edges.hpp"
#include "sk13/render/camera.hpp"
#include "sk13/render/rasterizer.hpp"
#include "sk13/render/sh_lighting.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sk13;
using namespace sk13::render;

namespace {

model::Mesh flat_mesh(const Eigen::Matrix3Xd& positions, std::vector<model::Triangle> triangles,
                      const Eigen::Matrix3Xd& colors)
{
    model::Mesh mesh;
    mesh.positions = positions;
    mesh.normals = Eigen::Matrix3Xd::Zero(3, positions.cols());
    mesh.normals.row(2).setConstant(-1.0);
    mesh.colors = colors;
    mesh.triangles = std::move(triangles);
    return mesh;
}

// Real SH basis from the closed-form normalization constants.
std::array<double, 9> sh_oracle(double x, double y, double z)
{
    const double pi = std::numbers::pi;
    const double c0 = 0.5 * std::sqrt(1.0 / pi);
    const double c1 = std::sqrt(3.0 / (4.0 * pi));
    const double c2 = 0.5 * std::sqrt(15.0 / pi);
    const double c3 = 0.25 * std::sqrt(5.0 / pi);
    const double c4 = 0.25 * std::sqrt(15.0 / pi);
    return {c0, c1 * y, c1 * z, c1 * x, c2 * x * y, c2 * y * z, c3 * (3 * z * z - 1), c2 * x * z, c4 * (x * x - y * y)};
}

} // namespace

TEST_CASE("projection examples")
{
    CameraParams cam;
    CHECK(project_point({3, 4, 5}, cam) == Eigen::Vector2d(3, 4));
    cam.scale = 2.0;
    cam.translation = Eigen::Vector2d(10, 0);
    CHECK(project_point({3, 4, 5}, cam) == Eigen::Vector2d(16, 8));

    cam.scale = 0.0;
    CHECK_THROWS_AS(cam.validate(), ValidationError);
    cam.scale = std::nan("");
    CHECK_THROWS_AS(cam.validate(), ValidationError);
}

TEST_CASE("batch projection equals the scalar formula exactly")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 5.0);
    Eigen::Matrix3Xd v(3, 1000);
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        v.data()[i] = n(rng);
    }
    const CameraParams cam{1.7, Eigen::Vector2d(3.25, -8.5)};
    const Eigen::Matrix2Xd p = project_vertices(v, cam);
    for (int i = 0; i < 1000; ++i)
    {
        CHECK(p(0, i) == cam.scale * v(0, i) + cam.translation[0]);
        CHECK(p(1, i) == cam.scale * v(1, i) + cam.translation[1]);
    }

    // Doubling the scale doubles the untranslated image coordinates.
    const CameraParams base{1.7, Eigen::Vector2d::Zero()};
    const CameraParams twice{3.4, cam.translation};
    const Eigen::Matrix2Xd q = project_vertices(v, twice);
    const Eigen::Matrix2Xd r = project_vertices(v, base);
    for (int i = 0; i < 1000; ++i)
    {
        CHECK(q(0, i) == 2.0 * r(0, i) + cam.translation[0]);
        CHECK(q(1, i) == 2.0 * r(1, i) + cam.translation[1]);
    }
}

TEST_CASE("SH basis and shading")
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        Eigen::Vector3d dir(n(rng), n(rng), n(rng));
        dir.normalize();
        const auto got = sh_basis(dir);
        const auto want = sh_oracle(dir.x(), dir.y(), dir.z());
        for (int k = 0; k < 9; ++k)
        {
            CHECK(std::abs(got[k] - want[k]) < 1e-14);
        }
    }

    const Eigen::Vector3d albedo(0.2, 0.5, 0.9);
    const Eigen::Vector3d up(0, 0, 1);
    const Eigen::Vector3d shaded = sh_shade(up, albedo, neutral_lighting());
    CHECK((shaded - albedo).norm() < 1e-15);
    CHECK(sh_shade(up, albedo, Eigen::Matrix<double, 27, 1>::Zero()) == Eigen::Vector3d::Zero());

    Eigen::Matrix<double, 27, 1> l = Eigen::Matrix<double, 27, 1>::Zero();
    l[2] = l[11] = l[20] = 1.0;
    const auto front = sh_irradiance_unclamped(sh_basis({0, 0, 1}), albedo, l);
    const auto back = sh_irradiance_unclamped(sh_basis({0, 0, -1}), albedo, l);
    const double y10 = std::sqrt(3.0 / (4.0 * std::numbers::pi));
    for (int c = 0; c < 3; ++c)
    {
        CHECK(front[c] == doctest::Approx(albedo[c] * y10).epsilon(1e-14));
        CHECK(back[c] == -front[c]);
    }
    CHECK(sh_shade({0, 0, -1}, albedo, l) == Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(sh_shade({0, 0, 1.01}, albedo, l), ValidationError);
}

TEST_CASE("empty mesh renders white with an empty mask")
{
    model::Mesh empty;
    empty.positions.resize(3, 0);
    empty.normals.resize(3, 0);
    empty.colors.resize(3, 0);
    for (RenderMode mode : {RenderMode::shaded, RenderMode::sketch})
    {
        const RenderedImage img = render_sketch(empty, {}, neutral_lighting(), 16, 12, mode);
        CHECK(img.width() == 16);
        CHECK(img.height() == 12);
        CHECK(img.mask_count() == 0);
        for (double v : img.pixels.pixels)
        {
            CHECK(v == 1.0);
        }
    }
    CHECK_THROWS_AS(rasterize(empty, {}, neutral_lighting(), 0, 5), ValidationError);
}

TEST_CASE("single triangle coverage equals the half-plane oracle")
{
    Eigen::Matrix2Xd p(2, 3);
    p << 2.5, 13.5, 2.5, 1.5, 1.5, 9.5;
    const std::vector<double> z = {1.0, 1.0, 1.0};
    const std::vector<model::Triangle> tris = {{0, 1, 2}};
    const Coverage cov = rasterize_coverage(p, z, tris, 16, 12);
    CHECK(cov.triangle == testing::brute_force_owner(p, z, tris, 16, 12));
    // Edges through pixel centers: the top edge y = 1.5 and left edge x = 2.5 are included.
    CHECK(cov.triangle[1 * 16 + 2] == 0);
    CHECK(cov.triangle[1 * 16 + 12] == 0);
    CHECK(cov.triangle[8 * 16 + 2] == 0);
    CHECK(cov.triangle[9 * 16 + 2] == -1); // the bottom vertex itself
    CHECK(cov.triangle[1 * 16 + 13] == -1);
}

TEST_CASE("abutting triangles cover shared edges exactly once")
{
    // A 6x6 grid of quads with corners on pixel centers, split along alternating diagonals.
    const int cells = 6;
    const double step = 5.0;
    Eigen::Matrix2Xd p(2, (cells + 1) * (cells + 1));
    std::vector<double> z(p.cols(), 0.0);
    for (int j = 0; j <= cells; ++j)
    {
        for (int i = 0; i <= cells; ++i)
        {
            p(0, j * (cells + 1) + i) = 0.5 + step * i;
            p(1, j * (cells + 1) + i) = 0.5 + step * j;
        }
    }
    std::vector<model::Triangle> tris;
    for (int j = 0; j < cells; ++j)
    {
        for (int i = 0; i < cells; ++i)
        {
            const int a = j * (cells + 1) + i;
            const int b = a + 1;
            const int c = a + cells + 1;
            const int d = c + 1;
            if ((i + j) % 2 == 0)
            {
                tris.push_back({a, b, d});
                tris.push_back({a, d, c});
            }
            else
            {
                tris.push_back({a, b, c});
                tris.push_back({b, d, c});
            }
        }
    }
    const int size = 32;
    std::vector<int> hits(size * size, 0);
    for (const auto& t : tris)
    {
        const std::vector<model::Triangle> one = {t};
        const Coverage cov = rasterize_coverage(p, z, one, size, size);
        for (std::size_t k = 0; k < hits.size(); ++k)
        {
            hits[k] += cov.triangle[k] >= 0;
        }
    }
    // Pixels with centers in [0.5, 30.5) on both axes are covered exactly once.
    for (int y = 0; y < size; ++y)
    {
        for (int x = 0; x < size; ++x)
        {
            const int expected = (x < 30 && y < 30) ? 1 : 0;
            CHECK(hits[y * size + x] == expected);
        }
    }
}

TEST_CASE("random scenes match brute force ownership")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const testing::RandomScene s = testing::random_scene(seed, 40, 25);
        const Coverage cov = rasterize_coverage(s.projected, s.depths, s.triangles, 40, 40);
        CHECK(cov.triangle == testing::brute_force_owner(s.projected, s.depths, s.triangles, 40, 40));
    }
}

TEST_CASE("nearer stacked triangle wins the overlap")
{
    Eigen::Matrix3Xd pos(3, 6);
    // Large far triangle, then a small near one inside it.
    pos << 1, 30, 1, 8, 16, 8,   //
        1, 1, 30, 8, 8, 16,      //
        5, 5, 5, 1, 1, 1;
    Eigen::Matrix3Xd colors(3, 6);
    colors.leftCols(3).colwise() = Eigen::Vector3d(1, 0, 0);
    colors.rightCols(3).colwise() = Eigen::Vector3d(0, 1, 0);
    const model::Mesh mesh = flat_mesh(pos, {{0, 1, 2}, {3, 4, 5}}, colors);
    const RenderedImage img = rasterize(mesh, {}, neutral_lighting(), 32, 32);
    // (10, 10) is inside both, (20, 4) only in the big one.
    CHECK(img.pixels.at(10, 10, 0) == 0.0);
    CHECK(img.pixels.at(10, 10, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(img.pixels.at(20, 4, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(img.pixels.at(20, 4, 1) == 0.0);
    CHECK(img.depth[10 * 32 + 10] == doctest::Approx(1.0));
    CHECK(img.depth[4 * 32 + 20] == doctest::Approx(5.0));

    // Swap depths: the big triangle now hides the small one.
    model::Mesh swapped = mesh;
    swapped.positions.row(2) << 0, 0, 0, 1, 1, 1;
    const RenderedImage hidden = rasterize(swapped, {}, neutral_lighting(), 32, 32);
    CHECK(hidden.pixels.at(10, 10, 1) == 0.0);

    // Equal depth: the lower triangle index wins.
    model::Mesh tied = mesh;
    tied.positions.row(2).setConstant(2.0);
    const RenderedImage tie = rasterize(tied, {}, neutral_lighting(), 32, 32);
    CHECK(tie.pixels.at(10, 10, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mask equals finite depth and renders are deterministic")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const model::Mesh mesh = evaluate_model(model::ModelParams::zeros(asset), asset);
    const CameraParams cam{40.0, Eigen::Vector2d(64, 64)};
    const RenderedImage a = rasterize(mesh, cam, neutral_lighting(), 128, 128);
    const RenderedImage b = rasterize(mesh, cam, neutral_lighting(), 128, 128);
    CHECK(a.pixels == b.pixels);
    CHECK(a.mask == b.mask);
    CHECK(a.mask_count() > 1000);
    for (std::size_t p = 0; p < a.mask.size(); ++p)
    {
        CHECK((a.mask[p] != 0) == std::isfinite(a.depth[p]));
        if (!a.mask[p])
        {
            CHECK(a.pixels.pixels[3 * p] == 1.0);
        }
    }
    for (double v : a.pixels.pixels)
    {
        CHECK((v >= 0.0 && v <= 1.0));
    }
}

TEST_CASE("sketch mode is the inverted edge map inside the mask")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const model::Mesh mesh = evaluate_model(model::ModelParams::zeros(asset), asset);
    const CameraParams cam{40.0, Eigen::Vector2d(64, 64)};
    const RenderedImage shaded = render_sketch(mesh, cam, neutral_lighting(), 128, 128, RenderMode::shaded);
    const RenderedImage sketch = render_sketch(mesh, cam, neutral_lighting(), 128, 128, RenderMode::sketch);
    CHECK(shaded.pixels.channels == 1);
    CHECK(sketch.mask == shaded.mask);
    const Image edges = dataset::edge_map(shaded.pixels);
    for (std::size_t p = 0; p < sketch.mask.size(); ++p)
    {
        const double expected = sketch.mask[p] ? 1.0 - edges.pixels[p] : 1.0;
        CHECK(sketch.pixels.pixels[p] == expected);
    }
}

TEST_CASE("flat shaded head gives a white interior and dark silhouette")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    model::Mesh mesh = evaluate_model(model::ModelParams::zeros(asset), asset);
    mesh.colors.setConstant(0.5);
    const int size = 128;
    const RenderedImage img = render_sketch(mesh, {40.0, Eigen::Vector2d(64, 64)}, neutral_lighting(), size, size);
    auto masked = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < size && y < size && img.mask[y * size + x] != 0;
    };
    double interior_sum = 0.0;
    int interior = 0;
    double rim_sum = 0.0;
    int rim = 0;
    for (int y = 0; y < size; ++y)
    {
        for (int x = 0; x < size; ++x)
        {
            if (!masked(x, y))
            {
                continue;
            }
            bool deep = true;
            bool boundary = false;
            for (int dy = -3; dy <= 3; ++dy)
            {
                for (int dx = -3; dx <= 3; ++dx)
                {
                    const bool in = masked(x + dx, y + dy);
                    deep = deep && in;
                    if (std::abs(dx) <= 1 && std::abs(dy) <= 1)
                    {
                        boundary = boundary || !in;
                    }
                }
            }
            if (deep)
            {
                interior_sum += img.pixels.at(x, y);
                ++interior;
            }
            if (boundary)
            {
                rim_sum += img.pixels.at(x, y);
                ++rim;
            }
        }
    }
    REQUIRE(interior > 500);
    REQUIRE(rim > 50);
    CHECK(interior_sum / interior > 0.99);
    CHECK(rim_sum / rim < 0.5);
}
