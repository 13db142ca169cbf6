/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: tests/test_model.cpp
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
#include "test_support.hpp"

#include "sk13/core/error.hpp"
#include "sk13/core/image_io.hpp"
#include "sk13/model/head_model.hpp"
#include "sk13/model/rotation.hpp"

#include "Eigen/LU"

#include <cmath>
#include <algorithm>
#include <random>
#include <sstream>

using namespace sk13;
using namespace sk13::model;

namespace {

// Rodrigues' formula written out element by element.
void rodrigues_oracle(const double w[3], double r[3][3])
{
    const double theta = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    if (theta == 0.0)
    {
        for (int i = 0; i < 3; ++i)
        {
            for (int j = 0; j < 3; ++j)
            {
                r[i][j] = i == j ? 1.0 : 0.0;
            }
        }
        return;
    }
    const double k[3] = {w[0] / theta, w[1] / theta, w[2] / theta};
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double kx[3][3] = {{0.0, -k[2], k[1]}, {k[2], 0.0, -k[0]}, {-k[1], k[0], 0.0}};
    for (int i = 0; i < 3; ++i)
    {
        for (int j = 0; j < 3; ++j)
        {
            r[i][j] = (i == j ? c : 0.0) + s * kx[i][j] + (1.0 - c) * k[i] * k[j];
        }
    }
}

ModelParams random_params(const HeadModelAsset& asset, std::uint64_t seed, double scale = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, scale);
    ModelParams p = ModelParams::zeros(asset);
    for (Eigen::Index i = 0; i < p.shape.size(); ++i)
    {
        p.shape[i] = n(rng);
    }
    for (Eigen::Index i = 0; i < p.expression.size(); ++i)
    {
        p.expression[i] = n(rng);
    }
    for (Eigen::Index i = 0; i < p.albedo.size(); ++i)
    {
        p.albedo[i] = 0.2 * n(rng);
    }
    for (int i = 0; i < pose_size; ++i)
    {
        p.pose[i] = 0.3 * n(rng);
    }
    for (Eigen::Index i = 0; i < p.detail.size(); ++i)
    {
        p.detail[i] = n(rng);
    }
    return p;
}

double max_abs(const Eigen::Matrix3Xd& m)
{
    return m.cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("axis-angle rotation matches Rodrigues' formula")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        const double w[3] = {n(rng), n(rng), n(rng)};
        double r[3][3];
        rodrigues_oracle(w, r);
        const Eigen::Matrix3d m = axis_angle_to_matrix(Eigen::Vector3d(w[0], w[1], w[2]));
        for (int i = 0; i < 3; ++i)
        {
            for (int j = 0; j < 3; ++j)
            {
                CHECK(std::abs(m(i, j) - r[i][j]) < 1e-14);
            }
        }
        CHECK((m.transpose() * m - Eigen::Matrix3d::Identity()).norm() < 1e-14);
        CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(axis_angle_to_matrix(Eigen::Vector3d::Zero()) == Eigen::Matrix3d::Identity());
}

TEST_CASE("rotation derivatives match central differences")
{
    const Eigen::Vector3d points[] = {
        {0.3, -0.7, 1.1}, {1e-9, 2e-9, -1e-9}, {0.0, 0.0, 0.0}, {3.0, 0.1, 0.2}, {1e-4, -3e-4, 2e-4}};
    const double h = 1e-6;
    for (const Eigen::Vector3d& w : points)
    {
        const auto d = axis_angle_derivatives(w);
        for (int k = 0; k < 3; ++k)
        {
            Eigen::Vector3d wp = w;
            Eigen::Vector3d wm = w;
            wp[k] += h;
            wm[k] -= h;
            const Eigen::Matrix3d fd = (axis_angle_to_matrix(wp) - axis_angle_to_matrix(wm)) / (2.0 * h);
            CHECK((fd - d[k]).norm() < 1e-8);
        }
    }
}

TEST_CASE("zero parameters reproduce the template exactly")
{
    const HeadModelAsset& asset = testing::desk_asset();
    const Eigen::Matrix3Xd pos = evaluate_positions(ModelParams::zeros(asset), asset);
    const Eigen::Map<const Eigen::Matrix3Xd> tmpl(asset.template_positions.data(), 3, asset.vertex_count);
    CHECK(pos == tmpl);
}

TEST_CASE("a unit identity code adds the first identity column")
{
    const HeadModelAsset& asset = testing::desk_asset();
    ModelParams p = ModelParams::zeros(asset);
    p.shape[0] = 1.0;
    const Eigen::Matrix3Xd pos = evaluate_positions(p, asset);
    const Eigen::VectorXd expected = asset.template_positions + asset.identity_basis.col(0);
    const Eigen::Map<const Eigen::Matrix3Xd> exp(expected.data(), 3, asset.vertex_count);
    CHECK(max_abs(pos - exp) < 1e-15);
}

TEST_CASE("evaluate_model matches a per-vertex scalar loop")
{
    const HeadModelAsset& asset = testing::desk_asset();
    const ModelParams p = random_params(asset, 11);
    const Eigen::Matrix3Xd pos = evaluate_positions(p, asset);

    const double wg[3] = {p.pose[0], p.pose[1], p.pose[2]};
    const double wj[3] = {p.pose[3], p.pose[4], p.pose[5]};
    double rg[3][3];
    double rj[3][3];
    rodrigues_oracle(wg, rg);
    rodrigues_oracle(wj, rj);

    double worst = 0.0;
    double largest = 0.0;
    for (int v = 0; v < asset.vertex_count; ++v)
    {
        double u[3];
        for (int c = 0; c < 3; ++c)
        {
            const int row = 3 * v + c;
            double sum = asset.template_positions[row];
            for (int k = 0; k < asset.shape_dims(); ++k)
            {
                sum += asset.identity_basis(row, k) * p.shape[k];
            }
            for (int k = 0; k < asset.expression_dims(); ++k)
            {
                sum += asset.expression_basis(row, k) * p.expression[k];
            }
            u[c] = sum;
        }
        const double w = asset.jaw_region_mask[v];
        double d[3];
        for (int c = 0; c < 3; ++c)
        {
            d[c] = u[c] - asset.jaw_pivot[c];
        }
        double a[3];
        for (int i = 0; i < 3; ++i)
        {
            double rotated = 0.0;
            for (int j = 0; j < 3; ++j)
            {
                rotated += rj[i][j] * d[j];
            }
            a[i] = (1.0 - w) * u[i] + w * (asset.jaw_pivot[i] + rotated);
        }
        for (int i = 0; i < 3; ++i)
        {
            double x = 0.0;
            for (int j = 0; j < 3; ++j)
            {
                x += rg[i][j] * a[j];
            }
            worst = std::max(worst, std::abs(x - pos(i, v)));
            largest = std::max(largest, std::abs(x));
        }
    }
    CHECK(worst / largest < 1e-10);
}

TEST_CASE("evaluate_model is affine in identity with zero pose")
{
    const HeadModelAsset& asset = testing::desk_asset();
    ModelParams a = ModelParams::zeros(asset);
    ModelParams b = ModelParams::zeros(asset);
    ModelParams ab = ModelParams::zeros(asset);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (Eigen::Index i = 0; i < a.shape.size(); ++i)
    {
        a.shape[i] = n(rng);
        b.shape[i] = n(rng);
        ab.shape[i] = a.shape[i] + b.shape[i];
    }
    const ModelParams zero = ModelParams::zeros(asset);
    const Eigen::Matrix3Xd t = evaluate_positions(zero, asset);
    const Eigen::Matrix3Xd sum = t + (evaluate_positions(a, asset) - t) + (evaluate_positions(b, asset) - t);
    CHECK(max_abs(evaluate_positions(ab, asset) - sum) < 1e-9);
}

TEST_CASE("global rotation preserves pairwise distances")
{
    const HeadModelAsset& asset = testing::desk_asset();
    ModelParams p = random_params(asset, 5);
    p.pose.head<3>().setZero();
    const Eigen::Matrix3Xd base = evaluate_positions(p, asset);
    p.pose.head<3>() = Eigen::Vector3d(0.4, -0.9, 0.25);
    const Eigen::Matrix3Xd turned = evaluate_positions(p, asset);
    double worst = 0.0;
    for (int i = 0; i < asset.vertex_count; i += 7)
    {
        for (int j = i + 1; j < asset.vertex_count; j += 13)
        {
            const double d0 = (base.col(i) - base.col(j)).norm();
            const double d1 = (turned.col(i) - turned.col(j)).norm();
            worst = std::max(worst, testing::rel_err(d0, d1));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("landmark evaluation agrees with the full mesh")
{
    const HeadModelAsset& asset = testing::desk_asset();
    const ModelParams p = random_params(asset, 8);
    const Eigen::Matrix3Xd all = evaluate_positions(p, asset);
    const Eigen::Matrix3Xd lmk = evaluate_landmark_positions(p, asset);
    for (int k = 0; k < landmark_count; ++k)
    {
        CHECK((lmk.col(k) - all.col(asset.landmark_indices[k])).norm() < 1e-12);
    }
}

TEST_CASE("mesh normals are unit and colors are clamped")
{
    const HeadModelAsset& asset = testing::desk_asset();
    ModelParams p = random_params(asset, 9);
    p.albedo *= 50.0;
    const Mesh mesh = evaluate_model(p, asset);
    for (int i = 0; i < mesh.vertex_count(); ++i)
    {
        CHECK(std::abs(mesh.normals.col(i).norm() - 1.0) < 1e-5);
    }
    CHECK(mesh.colors.minCoeff() >= 0.0);
    CHECK(mesh.colors.maxCoeff() <= 1.0);
    CHECK(mesh.triangles == asset.triangles);
}

TEST_CASE("outward normals on the template")
{
    const HeadModelAsset& asset = testing::desk_asset();
    const Mesh mesh = evaluate_model(ModelParams::zeros(asset), asset);
    const Eigen::Vector3d centroid = mesh.positions.rowwise().mean();
    int outward = 0;
    for (int i = 0; i < mesh.vertex_count(); ++i)
    {
        if (mesh.normals.col(i).dot(mesh.positions.col(i) - centroid) > 0.0)
        {
            ++outward;
        }
    }
    CHECK(outward > 0.95 * mesh.vertex_count());
}

TEST_CASE("parameter validation")
{
    const HeadModelAsset& asset = testing::desk_asset();
    ModelParams p = ModelParams::zeros(asset);
    p.shape.resize(3);
    CHECK_THROWS_AS(evaluate_model(p, asset), ConfigurationError);

    p = ModelParams::zeros(asset);
    p.expression[0] = std::nan("");
    CHECK_THROWS_AS(evaluate_model(p, asset), ValidationError);

    p = ModelParams::zeros(asset);
    p.camera.scale = 0.0;
    CHECK_THROWS_AS(p.validate(asset), ValidationError);
}

TEST_CASE("apply_detail")
{
    const HeadModelAsset& asset = testing::desk_asset();
    const Mesh mesh = evaluate_model(random_params(asset, 4, 0.5), asset);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(asset.detail_dims());

    SUBCASE("zero code leaves the mesh unchanged")
    {
        const Mesh out = apply_detail(mesh, delta, asset, 1.0);
        CHECK(out.positions == mesh.positions);
        CHECK(out.normals == mesh.normals);
    }
    SUBCASE("zero magnitude leaves the mesh unchanged")
    {
        delta[0] = 1.0;
        CHECK(apply_detail(mesh, delta, asset, 0.0).positions == mesh.positions);
    }
    SUBCASE("unit code displaces by the basis column")
    {
        delta[0] = 1.0;
        const Mesh out = apply_detail(mesh, delta, asset, 1.0);
        for (int v = 0; v < asset.vertex_count; ++v)
        {
            const Eigen::Vector3d shift = out.positions.col(v) - mesh.positions.col(v);
            CHECK(std::abs(shift.norm() - std::abs(asset.detail_basis(v, 0))) < 1e-12);
            CHECK(std::abs(shift.dot(mesh.normals.col(v)) - asset.detail_basis(v, 0)) < 1e-12);
        }
    }
    SUBCASE("opposite codes displace symmetrically")
    {
        for (Eigen::Index i = 0; i < delta.size(); ++i)
        {
            delta[i] = 0.1 * std::sin(1.0 + i);
        }
        const Mesh plus = apply_detail(mesh, delta, asset, 2.0);
        const Mesh minus = apply_detail(mesh, -delta, asset, 2.0);
        CHECK(max_abs(plus.positions + minus.positions - 2.0 * mesh.positions) < 1e-12);
    }
    SUBCASE("wrong code size")
    {
        CHECK_THROWS_AS(apply_detail(mesh, Eigen::VectorXd::Zero(3), asset, 1.0), ConfigurationError);
    }
}

TEST_CASE("desk asset generation")
{
    const HeadModelAsset& a = testing::desk_asset();
    CHECK_NOTHROW(a.validate());
    CHECK(a.vertex_count == 1000);
    CHECK(a.landmark_indices.size() == 68);

    const HeadModelAsset again = generate_desk_asset(42, 1000);
    CHECK(serialize_asset(again) == serialize_asset(a));

    const HeadModelAsset other = generate_desk_asset(43, 1000);
    CHECK(other.template_positions != a.template_positions);

    for (const Eigen::MatrixXd* basis : {&a.identity_basis, &a.expression_basis, &a.detail_basis})
    {
        for (Eigen::Index c = 0; c < basis->cols(); ++c)
        {
            CHECK(std::abs(basis->col(c).norm() - 1.0) < 1e-9);
        }
    }
    for (Eigen::Index c = 0; c < a.detail_basis.cols(); ++c)
    {
        CHECK(std::abs(a.detail_basis.col(c).mean()) < 1e-8);
    }
    std::vector<int> sorted = a.landmark_indices;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());

    BasisDims dims;
    dims.shape = 4;
    dims.detail = 3;
    const HeadModelAsset small = generate_desk_asset(1, 300, dims);
    CHECK(small.vertex_count == 300);
    CHECK(small.shape_dims() == 4);
    CHECK(small.detail_dims() == 3);

    CHECK_THROWS_AS(generate_desk_asset(42, 99), ValidationError);
    dims.albedo = -1;
    CHECK_THROWS_AS(generate_desk_asset(42, 1000, dims), ConfigurationError);
}

TEST_CASE("asset file round trip")
{
    const HeadModelAsset& a = testing::desk_asset();
    const auto bytes = serialize_asset(a);
    const HeadModelAsset back = deserialize_asset(bytes);
    CHECK(serialize_asset(back) == bytes);

    const auto dir = testing::scratch_dir("model");
    save_asset(a, dir / "head.sk13");
    CHECK(read_file_bytes(dir / "head.sk13") == bytes);
    CHECK(serialize_asset(load_asset(dir / "head.sk13")) == bytes);

    const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + bytes.size() / 2);
    CHECK_THROWS_AS(deserialize_asset(truncated), FormatError);

    std::vector<std::uint8_t> bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(deserialize_asset(bad_magic), FormatError);

    HeadModelAsset broken = back;
    broken.triangles[5][1] = broken.vertex_count;
    try
    {
        deserialize_asset(serialize_asset(broken));
        FAIL("expected a validation error");
    }
    catch (const ValidationError& e)
    {
        CHECK(e.field() == "triangles");
    }
}

TEST_CASE("params file round trip")
{
    const HeadModelAsset& asset = testing::desk_asset();
    ModelParams p = random_params(asset, 12);
    p.camera.scale = 37.25;
    p.camera.translation = Eigen::Vector2d(64.5, 60.0);
    // The container stores f32; round the values first so the comparison is exact.
    auto to_float = [](auto& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
        {
            v[i] = static_cast<float>(v[i]);
        }
    };
    to_float(p.shape);
    to_float(p.expression);
    to_float(p.albedo);
    to_float(p.pose);
    to_float(p.detail);
    const ModelParams back = deserialize_params(serialize_params(p));
    CHECK(back == p);

    auto bytes = serialize_params(p);
    bytes[bytes.size() - 1] ^= 0xFF;
    CHECK_THROWS_AS(deserialize_params(bytes), FormatError);
}

TEST_CASE("OBJ export")
{
    const HeadModelAsset& asset = testing::desk_asset();
    const Mesh mesh = evaluate_model(ModelParams::zeros(asset), asset);
    const std::string obj = to_obj(mesh);
    std::size_t v = 0;
    std::size_t vn = 0;
    std::size_t f = 0;
    std::istringstream in(obj);
    std::string line;
    while (std::getline(in, line))
    {
        if (line.rfind("v ", 0) == 0)
        {
            ++v;
        }
        else if (line.rfind("vn ", 0) == 0)
        {
            ++vn;
        }
        else if (line.rfind("f ", 0) == 0)
        {
            ++f;
        }
    }
    CHECK(v == 1000);
    CHECK(vn == 1000);
    CHECK(f == asset.triangles.size());
}
