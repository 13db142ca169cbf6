/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/model/head_model.hpp
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

#ifndef SK13_MODEL_HEAD_MODEL_HPP
#define SK13_MODEL_HEAD_MODEL_HPP

#include "sk13/render/camera.hpp"

#include "Eigen/Core"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sk13 {
namespace model {

constexpr int landmark_count = 68;
constexpr int pose_size = 6;
constexpr int lighting_size = 27;

using Triangle = std::array<int, 3>;

/**
 * A linear parametric head model.
 *
 * Vertex data is stored x0 y0 z0 x1 y1 z1 ... (3N rows); `detail_basis` holds one
 * scalar per vertex (N rows). Coordinates are model units with y pointing down
 * and the face looking towards -z.
 *
 * Identity, expression and detail basis columns have unit Euclidean norm and the
 * detail columns are zero-mean; `validate()` enforces this.
 */
struct HeadModelAsset
{
    int vertex_count = 0;
    Eigen::VectorXd template_positions;
    Eigen::MatrixXd identity_basis;
    Eigen::MatrixXd expression_basis;
    Eigen::VectorXd albedo_mean;
    Eigen::MatrixXd albedo_basis;
    std::vector<int> landmark_indices;
    Eigen::VectorXd jaw_region_mask;
    Eigen::Vector3d jaw_pivot = Eigen::Vector3d::Zero();
    std::vector<Triangle> triangles;
    Eigen::MatrixXd detail_basis;

    int shape_dims() const { return static_cast<int>(identity_basis.cols()); }
    int expression_dims() const { return static_cast<int>(expression_basis.cols()); }
    int albedo_dims() const { return static_cast<int>(albedo_basis.cols()); }
    int detail_dims() const { return static_cast<int>(detail_basis.cols()); }

    /// Throws ValidationError naming the first offending field.
    void validate() const;
};

/// Exact equality of every field, bit for bit.
bool identical(const HeadModelAsset& a, const HeadModelAsset& b);

/**
 * Everything estimated per sketch: identity shape, pose (global axis-angle then jaw
 * axis-angle), expression, per-vertex albedo coefficients, SH lighting (9 coefficients
 * per channel, R block then G then B), the weak-perspective camera and the detail code.
 */
struct ModelParams
{
    Eigen::VectorXd shape;
    Eigen::Matrix<double, pose_size, 1> pose = Eigen::Matrix<double, pose_size, 1>::Zero();
    Eigen::VectorXd expression;
    Eigen::VectorXd albedo;
    Eigen::Matrix<double, lighting_size, 1> lighting = Eigen::Matrix<double, lighting_size, 1>::Zero();
    render::CameraParams camera;
    Eigen::VectorXd detail;

    /// All codes zero, identity pose, no light, unit camera.
    static ModelParams zeros(const HeadModelAsset& asset);

    Eigen::Vector3d global_rotation() const { return pose.head<3>(); }
    Eigen::Vector3d jaw_rotation() const { return pose.tail<3>(); }

    /// Dimension mismatch -> ConfigurationError; non-finite or bad camera -> ValidationError.
    void validate(const HeadModelAsset& asset) const;

    /// Exact equality; vectors of different length compare unequal.
    friend bool operator==(const ModelParams& a, const ModelParams& b);
};

struct Mesh
{
    Eigen::Matrix3Xd positions;
    Eigen::Matrix3Xd normals;
    Eigen::Matrix3Xd colors;
    std::vector<Triangle> triangles;

    int vertex_count() const { return static_cast<int>(positions.cols()); }
};

/// Positions after identity, expression, jaw and global rotation, without detail.
Eigen::Matrix3Xd evaluate_positions(const ModelParams& params, const HeadModelAsset& asset);

/// Vertex positions of the 68 landmark vertices only (3 x 68), same transform as evaluate_positions.
Eigen::Matrix3Xd evaluate_landmark_positions(const ModelParams& params, const HeadModelAsset& asset);

/// Per-vertex albedo clamped to [0, 1].
Eigen::Matrix3Xd evaluate_colors(const ModelParams& params, const HeadModelAsset& asset);

/// Area-weighted vertex normals. Vertices without incident area get (0, 0, -1).
Eigen::Matrix3Xd compute_vertex_normals(const Eigen::Matrix3Xd& positions, std::span<const Triangle> triangles);

/// The coarse mesh of the model; the detail code is ignored here.
Mesh evaluate_model(const ModelParams& params, const HeadModelAsset& asset);

/// Scalar detail field (detail_basis * code), one value per vertex.
Eigen::VectorXd detail_field(const Eigen::VectorXd& detail, const HeadModelAsset& asset);

/**
 * Displaces each vertex along its (coarse) normal by magnitude * (detail_basis * detail)_v
 * and recomputes normals.
 */
Mesh apply_detail(const Mesh& mesh, const Eigen::VectorXd& detail, const HeadModelAsset& asset, double magnitude);

struct BasisDims
{
    int shape = 20;
    int expression = 10;
    int albedo = 10;
    int detail = 16;
};

/**
 * Procedural desk-scale head: a sphere with exactly `vertex_count` vertices deformed
 * into a head-like shape with nose, brows, eye sockets, lips and chin; smooth random
 * bases; landmarks at canonical facial anchor positions. Deterministic per seed.
 */
HeadModelAsset generate_desk_asset(std::uint64_t seed, int vertex_count, const BasisDims& dims = {});

/**
 * Asset container: magic "SK13HEAD", u32 version 1, u32 N, |shape|, |expression|,
 * |albedo|, |detail|, triangle count, then template, identity basis, expression basis,
 * albedo mean, albedo basis (matrices column-major, f32), landmark indices (u32),
 * jaw mask (f32), jaw pivot (3 x f32), triangles (u32), detail basis (f32), CRC32.
 */
std::vector<std::uint8_t> serialize_asset(const HeadModelAsset& asset);
HeadModelAsset deserialize_asset(std::span<const std::uint8_t> bytes);
void save_asset(const HeadModelAsset& asset, const std::filesystem::path& path);
HeadModelAsset load_asset(const std::filesystem::path& path);

/// Params container "SK13PRMS", same conventions as the asset container.
std::vector<std::uint8_t> serialize_params(const ModelParams& params);
ModelParams deserialize_params(std::span<const std::uint8_t> bytes);
void save_params(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

/// Wavefront OBJ with positions, normals and faces (1-based, v//vn).
std::string to_obj(const Mesh& mesh);
void write_obj(const Mesh& mesh, const std::filesystem::path& path);

} // namespace model
} // namespace sk13

#endif // SK13_MODEL_HEAD_MODEL_HPP
