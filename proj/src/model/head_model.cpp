/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/model/head_model.cpp
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
#include "sk13/model/head_model.hpp"
#include "sk13/core/error.hpp"
#include "sk13/model/rotation.hpp"

#include "Eigen/Geometry"

#include <algorithm>
#include <cmath>
#include <string>

namespace sk13 {
namespace model {

namespace {

template <typename Derived>
bool same(const Eigen::DenseBase<Derived>& a, const Eigen::DenseBase<Derived>& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.derived().array() == b.derived().array()).all();
}

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* field)
{
    if (!m.allFinite())
    {
        throw ValidationError(field, "contains non-finite values");
    }
}

void require_unit_columns(const Eigen::MatrixXd& basis, const char* field, bool zero_mean)
{
    constexpr double tolerance = 1e-6;
    for (Eigen::Index c = 0; c < basis.cols(); ++c)
    {
        const double norm = basis.col(c).norm();
        if (std::abs(norm - 1.0) > tolerance)
        {
            throw ValidationError(field, "column " + std::to_string(c) + " has norm " + std::to_string(norm) +
                                             ", expected 1");
        }
        if (zero_mean && std::abs(basis.col(c).mean()) > tolerance)
        {
            throw ValidationError(field, "column " + std::to_string(c) + " is not zero-mean");
        }
    }
}

void require_dims(Eigen::Index found, Eigen::Index expected, const char* field)
{
    if (found != expected)
    {
        throw ConfigurationError(std::string(field) + ": dimension " + std::to_string(found) + " does not match " +
                                 std::to_string(expected));
    }
}

} // namespace

void HeadModelAsset::validate() const
{
    const Eigen::Index n = vertex_count;
    if (vertex_count <= 0)
    {
        throw ValidationError("vertex_count", "must be positive");
    }
    if (template_positions.size() != 3 * n)
    {
        throw ValidationError("template", "expected 3N coordinates");
    }
    if (identity_basis.rows() != 3 * n || expression_basis.rows() != 3 * n || albedo_basis.rows() != 3 * n)
    {
        throw ValidationError("basis", "row count must be 3N");
    }
    if (albedo_mean.size() != 3 * n)
    {
        throw ValidationError("albedo_mean", "expected 3N values");
    }
    if (jaw_region_mask.size() != n)
    {
        throw ValidationError("jaw_region_mask", "expected N values");
    }
    if (detail_basis.rows() != n)
    {
        throw ValidationError("detail_basis", "row count must be N");
    }
    require_finite(template_positions, "template");
    require_finite(identity_basis, "identity_basis");
    require_finite(expression_basis, "expression_basis");
    require_finite(albedo_basis, "albedo_basis");
    require_finite(detail_basis, "detail_basis");
    require_finite(jaw_pivot, "jaw_pivot");
    if (!albedo_mean.allFinite() || albedo_mean.minCoeff() < 0.0 || albedo_mean.maxCoeff() > 1.0)
    {
        throw ValidationError("albedo_mean", "values must lie in [0, 1]");
    }
    if (!jaw_region_mask.allFinite() || jaw_region_mask.minCoeff() < 0.0 || jaw_region_mask.maxCoeff() > 1.0)
    {
        throw ValidationError("jaw_region_mask", "values must lie in [0, 1]");
    }
    if (landmark_indices.size() != landmark_count)
    {
        throw ValidationError("landmark_indices", "expected exactly 68 entries");
    }
    for (int index : landmark_indices)
    {
        if (index < 0 || index >= vertex_count)
        {
            throw ValidationError("landmark_indices", "index " + std::to_string(index) + " out of range");
        }
    }
    for (const Triangle& t : triangles)
    {
        for (int index : t)
        {
            if (index < 0 || index >= vertex_count)
            {
                throw ValidationError("triangles", "index " + std::to_string(index) + " out of range");
            }
        }
    }
    require_unit_columns(identity_basis, "identity_basis", false);
    require_unit_columns(expression_basis, "expression_basis", false);
    require_unit_columns(detail_basis, "detail_basis", true);
}

bool identical(const HeadModelAsset& a, const HeadModelAsset& b)
{
    return a.vertex_count == b.vertex_count && same(a.template_positions, b.template_positions) &&
           same(a.identity_basis, b.identity_basis) && same(a.expression_basis, b.expression_basis) &&
           same(a.albedo_mean, b.albedo_mean) && same(a.albedo_basis, b.albedo_basis) &&
           a.landmark_indices == b.landmark_indices && same(a.jaw_region_mask, b.jaw_region_mask) &&
           same(a.jaw_pivot, b.jaw_pivot) && a.triangles == b.triangles && same(a.detail_basis, b.detail_basis);
}

ModelParams ModelParams::zeros(const HeadModelAsset& asset)
{
    ModelParams p;
    p.shape = Eigen::VectorXd::Zero(asset.shape_dims());
    p.expression = Eigen::VectorXd::Zero(asset.expression_dims());
    p.albedo = Eigen::VectorXd::Zero(asset.albedo_dims());
    p.detail = Eigen::VectorXd::Zero(asset.detail_dims());
    return p;
}

void ModelParams::validate(const HeadModelAsset& asset) const
{
    require_dims(shape.size(), asset.shape_dims(), "shape");
    require_dims(expression.size(), asset.expression_dims(), "expression");
    require_dims(albedo.size(), asset.albedo_dims(), "albedo");
    require_dims(detail.size(), asset.detail_dims(), "detail");
    require_finite(shape, "shape");
    require_finite(pose, "pose");
    require_finite(expression, "expression");
    require_finite(albedo, "albedo");
    require_finite(lighting, "lighting");
    require_finite(detail, "detail");
    camera.validate();
}

bool operator==(const ModelParams& a, const ModelParams& b)
{
    return same(a.shape, b.shape) && same(a.pose, b.pose) && same(a.expression, b.expression) &&
           same(a.albedo, b.albedo) && same(a.lighting, b.lighting) && a.camera == b.camera &&
           same(a.detail, b.detail);
}

namespace {

// Applies jaw articulation and global rotation in place to a 3 x K block of
// unposed vertices whose asset indices are given by `index_of(k)`.
template <typename IndexOf>
void pose_vertices(Eigen::Matrix3Xd& vertices, const ModelParams& params, const HeadModelAsset& asset,
                   IndexOf index_of)
{
    const Eigen::Matrix3d jaw = axis_angle_to_matrix(params.jaw_rotation());
    const Eigen::Matrix3d jaw_delta = jaw - Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d global = axis_angle_to_matrix(params.global_rotation());
    for (Eigen::Index k = 0; k < vertices.cols(); ++k)
    {
        const double w = asset.jaw_region_mask[index_of(k)];
        Eigen::Vector3d v = vertices.col(k);
        if (w != 0.0)
        {
            v += w * (jaw_delta * (v - asset.jaw_pivot));
        }
        vertices.col(k) = global * v;
    }
}

} // namespace

Eigen::Matrix3Xd evaluate_positions(const ModelParams& params, const HeadModelAsset& asset)
{
    params.validate(asset);
    Eigen::VectorXd flat = asset.template_positions;
    flat.noalias() += asset.identity_basis * params.shape;
    flat.noalias() += asset.expression_basis * params.expression;
    Eigen::Matrix3Xd vertices = Eigen::Map<const Eigen::Matrix3Xd>(flat.data(), 3, asset.vertex_count);
    pose_vertices(vertices, params, asset, [](Eigen::Index k) { return k; });
    return vertices;
}

Eigen::Matrix3Xd evaluate_landmark_positions(const ModelParams& params, const HeadModelAsset& asset)
{
    params.validate(asset);
    Eigen::Matrix3Xd vertices(3, landmark_count);
    for (int k = 0; k < landmark_count; ++k)
    {
        const Eigen::Index row = 3 * static_cast<Eigen::Index>(asset.landmark_indices[k]);
        vertices.col(k) = asset.template_positions.segment<3>(row) +
                          asset.identity_basis.middleRows<3>(row) * params.shape +
                          asset.expression_basis.middleRows<3>(row) * params.expression;
    }
    pose_vertices(vertices, params, asset, [&](Eigen::Index k) { return asset.landmark_indices[k]; });
    return vertices;
}

Eigen::Matrix3Xd evaluate_colors(const ModelParams& params, const HeadModelAsset& asset)
{
    Eigen::VectorXd flat = asset.albedo_mean;
    flat.noalias() += asset.albedo_basis * params.albedo;
    flat = flat.cwiseMax(0.0).cwiseMin(1.0);
    return Eigen::Map<const Eigen::Matrix3Xd>(flat.data(), 3, asset.vertex_count);
}

Eigen::Matrix3Xd compute_vertex_normals(const Eigen::Matrix3Xd& positions, std::span<const Triangle> triangles)
{
    Eigen::Matrix3Xd normals = Eigen::Matrix3Xd::Zero(3, positions.cols());
    for (const Triangle& t : triangles)
    {
        const Eigen::Vector3d a = positions.col(t[0]);
        // Cross product length is twice the area, which is the weighting we want.
        const Eigen::Vector3d n = (positions.col(t[1]) - a).cross(positions.col(t[2]) - a);
        normals.col(t[0]) += n;
        normals.col(t[1]) += n;
        normals.col(t[2]) += n;
    }
    for (Eigen::Index i = 0; i < normals.cols(); ++i)
    {
        const double length = normals.col(i).norm();
        if (length > 0.0 && std::isfinite(length))
        {
            normals.col(i) /= length;
        }
        else
        {
            normals.col(i) = Eigen::Vector3d(0.0, 0.0, -1.0);
        }
    }
    return normals;
}

Mesh evaluate_model(const ModelParams& params, const HeadModelAsset& asset)
{
    Mesh mesh;
    mesh.positions = evaluate_positions(params, asset);
    mesh.normals = compute_vertex_normals(mesh.positions, asset.triangles);
    mesh.colors = evaluate_colors(params, asset);
    mesh.triangles = asset.triangles;
    return mesh;
}

Eigen::VectorXd detail_field(const Eigen::VectorXd& detail, const HeadModelAsset& asset)
{
    if (detail.size() != asset.detail_dims())
    {
        throw ConfigurationError("detail: code has " + std::to_string(detail.size()) +
                                 " entries but the asset has " + std::to_string(asset.detail_dims()) +
                                 " detail basis columns");
    }
    return asset.detail_basis * detail;
}

Mesh apply_detail(const Mesh& mesh, const Eigen::VectorXd& detail, const HeadModelAsset& asset, double magnitude)
{
    const Eigen::VectorXd field = detail_field(detail, asset);
    if (mesh.vertex_count() != asset.vertex_count)
    {
        throw ConfigurationError("mesh was not produced from this asset");
    }
    Mesh out = mesh;
    if (magnitude == 0.0 || detail.isZero(0.0))
    {
        return out;
    }
    for (Eigen::Index i = 0; i < out.positions.cols(); ++i)
    {
        out.positions.col(i) += (magnitude * field[i]) * mesh.normals.col(i);
    }
    out.normals = compute_vertex_normals(out.positions, out.triangles);
    return out;
}

} // namespace model
} // namespace sk13
