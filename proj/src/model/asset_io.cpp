/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/model/asset_io.cpp
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
#include "sk13/core/binary_format.hpp"
#include "sk13/core/error.hpp"
#include "sk13/core/image_io.hpp"
#include "sk13/model/head_model.hpp"

#include <cstdio>
#include <string>

namespace sk13 {
namespace model {

namespace {

constexpr std::string_view asset_magic = "SK13HEAD";
constexpr std::string_view params_magic = "SK13PRMS";
constexpr std::uint32_t format_version = 1;

// Generous upper bounds so a corrupt header cannot trigger a huge allocation.
constexpr std::uint32_t max_vertices = 10'000'000;
constexpr std::uint32_t max_dims = 100'000;

template <typename Derived>
void put_floats(ByteWriter& out, const Eigen::DenseBase<Derived>& values)
{
    // Eigen storage is column-major, which is the on-disk order for matrices.
    const auto& m = values.derived();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
    {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
        {
            out.put_f32(static_cast<float>(m(r, c)));
        }
    }
}

Eigen::MatrixXd get_floats(ByteReader& in, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
    {
        for (Eigen::Index r = 0; r < rows; ++r)
        {
            m(r, c) = in.get_f32();
        }
    }
    return m;
}

Eigen::VectorXd get_vector(ByteReader& in, Eigen::Index size)
{
    return get_floats(in, size, 1);
}

} // namespace

std::vector<std::uint8_t> serialize_asset(const HeadModelAsset& asset)
{
    ByteWriter out(asset_magic, format_version);
    out.put_u32(static_cast<std::uint32_t>(asset.vertex_count));
    out.put_u32(static_cast<std::uint32_t>(asset.shape_dims()));
    out.put_u32(static_cast<std::uint32_t>(asset.expression_dims()));
    out.put_u32(static_cast<std::uint32_t>(asset.albedo_dims()));
    out.put_u32(static_cast<std::uint32_t>(asset.detail_dims()));
    out.put_u32(static_cast<std::uint32_t>(asset.triangles.size()));
    put_floats(out, asset.template_positions);
    put_floats(out, asset.identity_basis);
    put_floats(out, asset.expression_basis);
    put_floats(out, asset.albedo_mean);
    put_floats(out, asset.albedo_basis);
    if (asset.landmark_indices.size() != landmark_count)
    {
        throw ValidationError("landmark_indices", "expected exactly 68 entries");
    }
    for (int index : asset.landmark_indices)
    {
        out.put_u32(static_cast<std::uint32_t>(index));
    }
    put_floats(out, asset.jaw_region_mask);
    put_floats(out, asset.jaw_pivot);
    for (const Triangle& t : asset.triangles)
    {
        for (int index : t)
        {
            out.put_u32(static_cast<std::uint32_t>(index));
        }
    }
    put_floats(out, asset.detail_basis);
    return std::move(out).finish();
}

HeadModelAsset deserialize_asset(std::span<const std::uint8_t> bytes)
{
    ByteReader in(bytes, asset_magic, format_version);
    const std::uint32_t n = in.get_u32();
    const std::uint32_t shape = in.get_u32();
    const std::uint32_t expression = in.get_u32();
    const std::uint32_t albedo = in.get_u32();
    const std::uint32_t detail = in.get_u32();
    const std::uint32_t triangle_count = in.get_u32();
    if (n == 0 || n > max_vertices || shape > max_dims || expression > max_dims || albedo > max_dims ||
        detail > max_dims || triangle_count > 4 * max_vertices)
    {
        throw FormatError("asset header dimensions out of range");
    }
    const std::size_t expected_words = 3ull * n * (2 + shape + expression + albedo) + landmark_count + n + 3 +
                                       3ull * triangle_count + static_cast<std::size_t>(n) * detail;
    if (in.remaining() != 4 * expected_words)
    {
        throw FormatError("asset payload size does not match its header");
    }

    HeadModelAsset asset;
    asset.vertex_count = static_cast<int>(n);
    asset.template_positions = get_vector(in, 3 * n);
    asset.identity_basis = get_floats(in, 3 * n, shape);
    asset.expression_basis = get_floats(in, 3 * n, expression);
    asset.albedo_mean = get_vector(in, 3 * n);
    asset.albedo_basis = get_floats(in, 3 * n, albedo);
    asset.landmark_indices.resize(landmark_count);
    for (int& index : asset.landmark_indices)
    {
        index = static_cast<int>(std::min<std::uint32_t>(in.get_u32(), 0x7fffffffu));
    }
    asset.jaw_region_mask = get_vector(in, n);
    asset.jaw_pivot = get_vector(in, 3);
    asset.triangles.resize(triangle_count);
    for (Triangle& t : asset.triangles)
    {
        for (int& index : t)
        {
            index = static_cast<int>(std::min<std::uint32_t>(in.get_u32(), 0x7fffffffu));
        }
    }
    asset.detail_basis = get_floats(in, n, detail);
    asset.validate();
    return asset;
}

void save_asset(const HeadModelAsset& asset, const std::filesystem::path& path)
{
    write_file_bytes(path, serialize_asset(asset));
}

HeadModelAsset load_asset(const std::filesystem::path& path)
{
    return deserialize_asset(read_file_bytes(path));
}

std::vector<std::uint8_t> serialize_params(const ModelParams& params)
{
    ByteWriter out(params_magic, format_version);
    out.put_u32(static_cast<std::uint32_t>(params.shape.size()));
    out.put_u32(static_cast<std::uint32_t>(params.expression.size()));
    out.put_u32(static_cast<std::uint32_t>(params.albedo.size()));
    out.put_u32(static_cast<std::uint32_t>(params.detail.size()));
    put_floats(out, params.shape);
    put_floats(out, params.pose);
    put_floats(out, params.expression);
    put_floats(out, params.albedo);
    put_floats(out, params.lighting);
    out.put_f32(static_cast<float>(params.camera.scale));
    put_floats(out, params.camera.translation);
    put_floats(out, params.detail);
    return std::move(out).finish();
}

ModelParams deserialize_params(std::span<const std::uint8_t> bytes)
{
    ByteReader in(bytes, params_magic, format_version);
    const std::uint32_t shape = in.get_u32();
    const std::uint32_t expression = in.get_u32();
    const std::uint32_t albedo = in.get_u32();
    const std::uint32_t detail = in.get_u32();
    if (shape > max_dims || expression > max_dims || albedo > max_dims || detail > max_dims)
    {
        throw FormatError("params header dimensions out of range");
    }
    const std::size_t expected_words =
        std::size_t{shape} + expression + albedo + detail + pose_size + lighting_size + 3;
    if (in.remaining() != 4 * expected_words)
    {
        throw FormatError("params payload size does not match its header");
    }
    ModelParams p;
    p.shape = get_vector(in, shape);
    p.pose = get_vector(in, pose_size);
    p.expression = get_vector(in, expression);
    p.albedo = get_vector(in, albedo);
    p.lighting = get_vector(in, lighting_size);
    p.camera.scale = in.get_f32();
    p.camera.translation = get_vector(in, 2);
    p.detail = get_vector(in, detail);
    return p;
}

void save_params(const ModelParams& params, const std::filesystem::path& path)
{
    write_file_bytes(path, serialize_params(params));
}

ModelParams load_params(const std::filesystem::path& path)
{
    return deserialize_params(read_file_bytes(path));
}

std::string to_obj(const Mesh& mesh)
{
    std::string out;
    out.reserve(static_cast<std::size_t>(mesh.vertex_count()) * 80 + mesh.triangles.size() * 40);
    char line[160];
    for (int i = 0; i < mesh.vertex_count(); ++i)
    {
        const auto p = mesh.positions.col(i);
        std::snprintf(line, sizeof(line), "v %.6f %.6f %.6f\n", p.x(), p.y(), p.z());
        out += line;
    }
    for (int i = 0; i < mesh.vertex_count(); ++i)
    {
        const auto n = mesh.normals.col(i);
        std::snprintf(line, sizeof(line), "vn %.6f %.6f %.6f\n", n.x(), n.y(), n.z());
        out += line;
    }
    for (const Triangle& t : mesh.triangles)
    {
        std::snprintf(line, sizeof(line), "f %d//%d %d//%d %d//%d\n", t[0] + 1, t[0] + 1, t[1] + 1, t[1] + 1,
                      t[2] + 1, t[2] + 1);
        out += line;
    }
    return out;
}

void write_obj(const Mesh& mesh, const std::filesystem::path& path)
{
    const std::string text = to_obj(mesh);
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace model
} // namespace sk13
