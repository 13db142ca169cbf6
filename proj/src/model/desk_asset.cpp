/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/model/desk_asset.cpp
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
#include "sk13/core/error.hpp"
#include "sk13/model/head_model.hpp"

#include "Eigen/Geometry"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace sk13 {
namespace model {

namespace {

constexpr double pi = std::numbers::pi;

double radians(double degrees) { return degrees * pi / 180.0; }

double smoothstep(double edge0, double edge1, double x)
{
    const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

// Unit-sphere direction for polar angle `polar` (0 = top of head) and longitude
// `longitude` (0 = face front). y points down, the face looks towards -z.
Eigen::Vector3d sphere_direction(double polar, double longitude)
{
    return {std::sin(polar) * std::sin(longitude), -std::cos(polar), -std::sin(polar) * std::cos(longitude)};
}

struct SphereMesh
{
    std::vector<Eigen::Vector3d> directions;
    std::vector<Triangle> triangles;
};

// Latitude rings with per-ring vertex counts proportional to the ring circumference,
// so that the total is exactly `vertex_count` (two poles included).
SphereMesh build_sphere(int vertex_count)
{
    const int rings = std::max(3, static_cast<int>(std::lround(std::sqrt(pi * vertex_count / 4.0))));
    const int budget = vertex_count - 2;
    std::vector<double> polar(rings);
    std::vector<double> weight(rings);
    double weight_sum = 0.0;
    for (int r = 0; r < rings; ++r)
    {
        polar[r] = pi * (r + 1) / (rings + 1);
        weight[r] = std::sin(polar[r]);
        weight_sum += weight[r];
    }
    // Largest-remainder apportionment with a floor of 3 vertices per ring.
    std::vector<int> count(rings, 3);
    int remaining = budget - 3 * rings;
    if (remaining < 0)
    {
        throw ValidationError("vertex_count", "too small for a closed sphere");
    }
    std::vector<double> share(rings);
    int assigned = 0;
    for (int r = 0; r < rings; ++r)
    {
        share[r] = remaining * weight[r] / weight_sum;
        const int whole = static_cast<int>(std::floor(share[r]));
        count[r] += whole;
        assigned += whole;
    }
    std::vector<int> order(rings);
    for (int r = 0; r < rings; ++r)
    {
        order[r] = r;
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
    });
    for (int k = 0; k < remaining - assigned; ++k)
    {
        ++count[order[k % rings]];
    }

    SphereMesh sphere;
    sphere.directions.push_back(sphere_direction(0.0, 0.0));
    std::vector<int> ring_start(rings);
    std::vector<double> ring_offset(rings);
    for (int r = 0; r < rings; ++r)
    {
        ring_start[r] = static_cast<int>(sphere.directions.size());
        ring_offset[r] = (r % 2) * 0.5;
        for (int j = 0; j < count[r]; ++j)
        {
            const double longitude = -pi + 2.0 * pi * (j + ring_offset[r]) / count[r];
            sphere.directions.push_back(sphere_direction(polar[r], longitude));
        }
    }
    sphere.directions.push_back(sphere_direction(pi, 0.0));
    const int top = 0;
    const int bottom = static_cast<int>(sphere.directions.size()) - 1;

    auto ring_vertex = [&](int r, int j) { return ring_start[r] + (j % count[r]); };
    auto ring_angle = [&](int r, int j) { return (j + ring_offset[r]) / count[r]; };

    for (int j = 0; j < count[0]; ++j)
    {
        sphere.triangles.push_back({top, ring_vertex(0, j), ring_vertex(0, j + 1)});
    }
    for (int r = 0; r + 1 < rings; ++r)
    {
        int i = 0;
        int j = 0;
        while (i < count[r] || j < count[r + 1])
        {
            const bool advance_upper =
                j == count[r + 1] || (i < count[r] && ring_angle(r, i + 1) < ring_angle(r + 1, j + 1));
            if (advance_upper)
            {
                sphere.triangles.push_back({ring_vertex(r, i), ring_vertex(r + 1, j), ring_vertex(r, i + 1)});
                ++i;
            }
            else
            {
                sphere.triangles.push_back({ring_vertex(r, i), ring_vertex(r + 1, j), ring_vertex(r + 1, j + 1)});
                ++j;
            }
        }
    }
    for (int j = 0; j < count[rings - 1]; ++j)
    {
        sphere.triangles.push_back({bottom, ring_vertex(rings - 1, j + 1), ring_vertex(rings - 1, j)});
    }
    // Orient every face outwards.
    for (Triangle& t : sphere.triangles)
    {
        const Eigen::Vector3d& a = sphere.directions[t[0]];
        const Eigen::Vector3d& b = sphere.directions[t[1]];
        const Eigen::Vector3d& c = sphere.directions[t[2]];
        if ((b - a).cross(c - a).dot(a + b + c) < 0.0)
        {
            std::swap(t[1], t[2]);
        }
    }
    return sphere;
}

struct Feature
{
    double polar_deg;
    double longitude_deg;
    double polar_width_deg;
    double longitude_width_deg;
    double height;
};

double feature_weight(const Feature& f, double polar, double longitude)
{
    const double dp = (polar - radians(f.polar_deg)) / radians(f.polar_width_deg);
    const double dl = (longitude - radians(f.longitude_deg)) / radians(f.longitude_width_deg);
    return std::exp(-0.5 * (dp * dp + dl * dl));
}

const std::vector<Feature>& relief_features()
{
    static const std::vector<Feature> features = {
        {96.0, 0.0, 9.0, 5.0, 0.16},     // nose
        {84.0, 0.0, 6.0, 4.0, 0.05},     // nose bridge
        {81.0, -21.0, 4.0, 7.0, -0.05},  // eye sockets
        {81.0, 21.0, 4.0, 7.0, -0.05},
        {70.0, -21.0, 3.0, 12.0, 0.03},  // brow ridges
        {70.0, 21.0, 3.0, 12.0, 0.03},
        {113.0, 0.0, 2.5, 12.0, 0.035},  // upper lip
        {120.0, 0.0, 2.5, 11.0, 0.03},   // lower lip
        {116.5, 0.0, 1.2, 12.0, -0.02},  // mouth line
        {140.0, 0.0, 8.0, 14.0, 0.04},   // chin
    };
    return features;
}

// Darker albedo on brows, eyes and lips produces interior contours in renders.
struct AlbedoFeature
{
    Feature where;
    Eigen::Vector3d tint;
};

const std::vector<AlbedoFeature>& albedo_features()
{
    static const std::vector<AlbedoFeature> features = {
        {{69.0, -21.0, 2.5, 10.0, 1.0}, {-0.45, -0.42, -0.38}},
        {{69.0, 21.0, 2.5, 10.0, 1.0}, {-0.45, -0.42, -0.38}},
        {{81.0, -21.0, 2.0, 5.0, 1.0}, {-0.4, -0.4, -0.38}},
        {{81.0, 21.0, 2.0, 5.0, 1.0}, {-0.4, -0.4, -0.38}},
        {{116.5, 0.0, 3.5, 11.0, 1.0}, {-0.1, -0.25, -0.22}},
    };
    return features;
}

struct Anchor
{
    double polar_deg;
    double longitude_deg;
};

// 68-point layout: jaw 0-16, brows 17-26, nose 27-35, eyes 36-47, outer mouth 48-59,
// inner mouth 60-67. Index 0 is on the subject's right, i.e. image left (-x).
std::vector<Anchor> landmark_anchors()
{
    std::vector<Anchor> a;
    for (int i = 0; i <= 16; ++i)
    {
        const double longitude = -75.0 + 150.0 * i / 16.0;
        const double u = longitude / 75.0;
        a.push_back({100.0 + 45.0 * (1.0 - u * u), longitude});
    }
    const double brow_lon[5] = {-38, -30, -22, -14, -7};
    const double brow_pol[5] = {72, 68, 67, 68, 71};
    for (int i = 0; i < 5; ++i)
    {
        a.push_back({brow_pol[i], brow_lon[i]});
    }
    for (int i = 4; i >= 0; --i)
    {
        a.push_back({brow_pol[i], -brow_lon[i]});
    }
    for (double polar : {80.0, 86.0, 92.0, 98.0})
    {
        a.push_back({polar, 0.0});
    }
    const double nostril_pol[5] = {104, 105, 106, 105, 104};
    const double nostril_lon[5] = {-9, -4.5, 0, 4.5, 9};
    for (int i = 0; i < 5; ++i)
    {
        a.push_back({nostril_pol[i], nostril_lon[i]});
    }
    const Anchor right_eye[6] = {{81, -29}, {79, -24}, {79, -17}, {81, -12}, {83, -17}, {83, -24}};
    const Anchor left_eye[6] = {{81, 12}, {79, 17}, {79, 24}, {81, 29}, {83, 24}, {83, 17}};
    a.insert(a.end(), std::begin(right_eye), std::end(right_eye));
    a.insert(a.end(), std::begin(left_eye), std::end(left_eye));
    const Anchor outer_mouth[12] = {{116, -17}, {113, -11}, {112, -5},    {112.5, 0}, {112, 5},     {113, 11},
                                    {116, 17},  {120, 11},  {121.5, 5}, {122, 0},   {121.5, -5}, {120, -11}};
    const Anchor inner_mouth[8] = {{116, -13}, {115, -5}, {115, 0}, {115, 5},
                                   {116, 13},  {117, 5},  {117, 0}, {117, -5}};
    a.insert(a.end(), std::begin(outer_mouth), std::end(outer_mouth));
    a.insert(a.end(), std::begin(inner_mouth), std::end(inner_mouth));
    return a;
}

// Rounds a column to float precision and makes it unit-norm (and optionally
// zero-mean) to well below float resolution by absorbing the residual into one
// small entry.
void snap_column(Eigen::Ref<Eigen::VectorXd> column, bool zero_mean)
{
    auto to_float = [](double v) { return static_cast<double>(static_cast<float>(v)); };
    if (zero_mean)
    {
        column.array() -= column.mean();
    }
    column /= column.norm();
    column = column.unaryExpr(to_float);
    if (zero_mean)
    {
        const double mean = column.mean();
        column = (column.array() - mean).matrix().unaryExpr(to_float);
    }
    const double residual = 1.0 - column.squaredNorm();
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < column.size(); ++i)
    {
        const double v = std::abs(column[i]);
        if (v >= 1e-3 && column[i] * column[i] + residual > 0.0 && (best < 0 || v < std::abs(column[best])))
        {
            best = i;
        }
    }
    if (best >= 0)
    {
        const double sign = column[best] < 0.0 ? -1.0 : 1.0;
        column[best] = to_float(sign * std::sqrt(column[best] * column[best] + residual));
    }
}

struct FieldSpec
{
    int bumps;
    double width;
    bool face_only;
};

// Sum of random angular Gaussians on the sphere; `components` values per vertex.
Eigen::VectorXd smooth_random_field(std::mt19937_64& rng, const std::vector<Eigen::Vector3d>& directions,
                                    int components, const FieldSpec& spec)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Eigen::Vector3d> centers(spec.bumps);
    std::vector<Eigen::VectorXd> amplitudes(spec.bumps);
    for (int k = 0; k < spec.bumps; ++k)
    {
        Eigen::Vector3d c(normal(rng), normal(rng), normal(rng));
        if (spec.face_only && c.z() > 0.0)
        {
            c.z() = -c.z();
        }
        centers[k] = c.normalized();
        amplitudes[k] = Eigen::VectorXd(components);
        for (int i = 0; i < components; ++i)
        {
            amplitudes[k][i] = normal(rng);
        }
    }
    const Eigen::Index n = static_cast<Eigen::Index>(directions.size());
    Eigen::VectorXd field = Eigen::VectorXd::Zero(n * components);
    const double inv_width_sq = 1.0 / (spec.width * spec.width);
    for (Eigen::Index v = 0; v < n; ++v)
    {
        for (int k = 0; k < spec.bumps; ++k)
        {
            const double w = std::exp(-(1.0 - directions[v].dot(centers[k])) * inv_width_sq);
            field.segment(v * components, components) += w * amplitudes[k];
        }
    }
    return field;
}

Eigen::MatrixXd random_basis(std::mt19937_64& rng, const std::vector<Eigen::Vector3d>& directions, int components,
                             int columns, const FieldSpec& spec, bool zero_mean)
{
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(directions.size()) * components, columns);
    for (int c = 0; c < columns; ++c)
    {
        basis.col(c) = smooth_random_field(rng, directions, components, spec);
        snap_column(basis.col(c), zero_mean);
    }
    return basis;
}

} // namespace

HeadModelAsset generate_desk_asset(std::uint64_t seed, int vertex_count, const BasisDims& dims)
{
    if (vertex_count < 100)
    {
        throw ValidationError("vertex_count", "at least 100 vertices are needed to host 68 distinct landmarks");
    }
    if (dims.shape < 0 || dims.expression < 0 || dims.albedo < 0 || dims.detail < 0)
    {
        throw ConfigurationError("basis dimensions must be non-negative");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const SphereMesh sphere = build_sphere(vertex_count);
    const int n = vertex_count;

    // Per-seed head proportions so different seeds give different templates.
    const double width = 0.78 * (1.0 + 0.04 * normal(rng));
    const double depth = 0.92 * (1.0 + 0.04 * normal(rng));
    const double chin_taper = 0.25 * (1.0 + 0.1 * normal(rng));

    HeadModelAsset asset;
    asset.vertex_count = n;
    asset.template_positions.resize(3 * n);
    asset.albedo_mean.resize(3 * n);
    asset.jaw_region_mask.resize(n);
    const Eigen::Vector3d skin(0.78, 0.64, 0.56);
    for (int v = 0; v < n; ++v)
    {
        const Eigen::Vector3d& d = sphere.directions[v];
        const double polar = std::acos(std::clamp(-d.y(), -1.0, 1.0));
        const double longitude = std::atan2(d.x(), -d.z());
        double relief = 0.0;
        for (const Feature& f : relief_features())
        {
            relief += f.height * feature_weight(f, polar, longitude);
        }
        Eigen::Vector3d p = d * (1.0 + relief);
        p.x() *= width * (1.0 - chin_taper * smoothstep(0.3, 1.0, d.y()));
        p.z() *= depth;
        for (int c = 0; c < 3; ++c)
        {
            asset.template_positions[3 * v + c] = static_cast<float>(p[c]);
        }
        Eigen::Vector3d albedo = skin;
        for (const AlbedoFeature& f : albedo_features())
        {
            albedo += feature_weight(f.where, polar, longitude) * f.tint;
        }
        for (int c = 0; c < 3; ++c)
        {
            asset.albedo_mean[3 * v + c] = static_cast<float>(std::clamp(albedo[c], 0.0, 1.0));
        }
        const double front = smoothstep(-0.2, 0.3, std::cos(longitude));
        asset.jaw_region_mask[v] = static_cast<float>(smoothstep(radians(108.0), radians(128.0), polar) * front);
    }
    asset.jaw_pivot = Eigen::Vector3f(0.0f, 0.1f, 0.1f).cast<double>();
    asset.triangles = sphere.triangles;

    asset.identity_basis = random_basis(rng, sphere.directions, 3, dims.shape, {6, 0.5, false}, false);
    asset.expression_basis = random_basis(rng, sphere.directions, 3, dims.expression, {5, 0.3, true}, false);
    asset.albedo_basis = random_basis(rng, sphere.directions, 3, dims.albedo, {6, 0.6, false}, false);
    asset.detail_basis = random_basis(rng, sphere.directions, 1, dims.detail, {16, 0.15, true}, true);

    // Nearest unused vertex to each anchor, in landmark order.
    std::vector<bool> used(n, false);
    for (const Anchor& anchor : landmark_anchors())
    {
        const Eigen::Vector3d target = sphere_direction(radians(anchor.polar_deg), radians(anchor.longitude_deg));
        int best = -1;
        double best_distance = 0.0;
        for (int v = 0; v < n; ++v)
        {
            if (used[v])
            {
                continue;
            }
            const double distance = (sphere.directions[v] - target).squaredNorm();
            if (best < 0 || distance < best_distance)
            {
                best = v;
                best_distance = distance;
            }
        }
        used[best] = true;
        asset.landmark_indices.push_back(best);
    }
    asset.validate();
    return asset;
}

} // namespace model
} // namespace sk13
