/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/fitting/gradients.cpp
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
#include "sk13/fitting/gradients.hpp"
#include "sk13/core/error.hpp"
#include "sk13/losses/losses.hpp"
#include "sk13/model/rotation.hpp"
#include "sk13/render/camera.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace sk13 {
namespace fitting {

namespace {

double sign(double v)
{
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
}

ParameterBlock block(const char* name, std::size_t& offset, std::size_t size)
{
    ParameterBlock b{name, offset, size, 1.0};
    offset += size;
    return b;
}

/// Adds the pair-term subgradient with respect to the projected landmarks.
void accumulate_pairs(Eigen::Matrix2Xd& grad, const losses::LandmarkSet& target, const Eigen::Matrix2Xd& projected,
                      const std::vector<losses::IndexPair>& pairs, double weight)
{
    for (const auto& [i, j] : pairs)
    {
        const Eigen::Vector2d r = (target.points.col(i) - target.points.col(j)) - (projected.col(i) - projected.col(j));
        for (int a = 0; a < 2; ++a)
        {
            const double s = sign(r[a]);
            grad(a, i) -= weight * s;
            grad(a, j) += weight * s;
        }
    }
}

Eigen::Matrix2Xd mutual_distance_pixel_gradient(const losses::LandmarkSet& target, const Eigen::Matrix2Xd& projected,
                                                const losses::PairSpec& pairs, const losses::LossWeights& weights)
{
    Eigen::Matrix2Xd grad = Eigen::Matrix2Xd::Zero(2, losses::landmark_count);
    accumulate_pairs(grad, target, projected, pairs.eye_pairs, weights.eye_pairs);
    accumulate_pairs(grad, target, projected, pairs.mouth_pairs, weights.mouth_pairs);
    accumulate_pairs(grad, target, projected, pairs.contour_pairs, weights.contour_pairs);
    return grad;
}

} // namespace

CoarseLayout::CoarseLayout(const model::HeadModelAsset& asset)
{
    std::size_t offset = 0;
    shape = block("shape", offset, static_cast<std::size_t>(asset.shape_dims()));
    pose = block("pose", offset, model::pose_size);
    expression = block("expression", offset, static_cast<std::size_t>(asset.expression_dims()));
    albedo = block("albedo", offset, static_cast<std::size_t>(asset.albedo_dims()));
    lighting = block("lighting", offset, model::lighting_size);
    camera_scale = block("camera_scale", offset, 1);
    camera_translation = block("camera_translation", offset, 2);
}

std::vector<ParameterBlock> CoarseLayout::blocks() const
{
    return {shape, pose, expression, albedo, lighting, camera_scale, camera_translation};
}

Eigen::VectorXd pack_coarse(const model::ModelParams& params, const CoarseLayout& layout)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(layout.size()));
    auto seg = [&](const ParameterBlock& b) {
        return x.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size));
    };
    if (params.shape.size() != static_cast<Eigen::Index>(layout.shape.size) ||
        params.expression.size() != static_cast<Eigen::Index>(layout.expression.size) ||
        params.albedo.size() != static_cast<Eigen::Index>(layout.albedo.size))
    {
        throw ConfigurationError("parameter dimensions do not match the coarse layout");
    }
    seg(layout.shape) = params.shape;
    seg(layout.pose) = params.pose;
    seg(layout.expression) = params.expression;
    seg(layout.albedo) = params.albedo;
    seg(layout.lighting) = params.lighting;
    x[static_cast<Eigen::Index>(layout.camera_scale.offset)] = params.camera.scale;
    seg(layout.camera_translation) = params.camera.translation;
    return x;
}

model::ModelParams unpack_coarse(const Eigen::VectorXd& x, const CoarseLayout& layout, const model::ModelParams& base)
{
    if (x.size() != static_cast<Eigen::Index>(layout.size()))
    {
        throw ConfigurationError("flat parameter vector has the wrong length");
    }
    auto seg = [&](const ParameterBlock& b) {
        return x.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size));
    };
    model::ModelParams p = base;
    p.shape = seg(layout.shape);
    p.pose = seg(layout.pose);
    p.expression = seg(layout.expression);
    p.albedo = seg(layout.albedo);
    p.lighting = seg(layout.lighting);
    p.camera.scale = x[static_cast<Eigen::Index>(layout.camera_scale.offset)];
    p.camera.translation = seg(layout.camera_translation);
    return p;
}

GradientResult analytic_gradients(const model::ModelParams& params, const model::HeadModelAsset& asset,
                                  const losses::LandmarkSet& target, const losses::PairSpec& pairs,
                                  const losses::LossWeights& weights)
{
    params.validate(asset);
    target.validate();
    const CoarseLayout layout(asset);
    const int n = losses::landmark_count;

    const Eigen::Vector3d global_aa = params.global_rotation();
    const Eigen::Vector3d jaw_aa = params.jaw_rotation();
    const Eigen::Matrix3d rg = model::axis_angle_to_matrix(global_aa);
    const Eigen::Matrix3d rj = model::axis_angle_to_matrix(jaw_aa);
    const auto drg = model::axis_angle_derivatives(global_aa);
    const auto drj = model::axis_angle_derivatives(jaw_aa);
    const Eigen::Matrix3d identity = Eigen::Matrix3d::Identity();

    Eigen::Matrix3Xd unposed(3, n);
    Eigen::Matrix3Xd jawed(3, n);
    Eigen::Matrix3Xd posed(3, n);
    for (int k = 0; k < n; ++k)
    {
        const Eigen::Index row = 3 * static_cast<Eigen::Index>(asset.landmark_indices[k]);
        unposed.col(k) = asset.template_positions.segment<3>(row) +
                         asset.identity_basis.middleRows<3>(row) * params.shape +
                         asset.expression_basis.middleRows<3>(row) * params.expression;
        const double w = asset.jaw_region_mask[asset.landmark_indices[k]];
        jawed.col(k) = unposed.col(k) + w * ((rj - identity) * (unposed.col(k) - asset.jaw_pivot));
        posed.col(k) = rg * jawed.col(k);
    }
    const Eigen::Matrix2Xd projected = render::project_vertices(posed, params.camera);

    GradientResult result;
    result.value = losses::landmark_loss(target, projected) +
                   losses::mutual_distance_loss(target, projected, pairs, weights);

    // Derivative of the loss with respect to each projected landmark.
    Eigen::Matrix2Xd g = mutual_distance_pixel_gradient(target, projected, pairs, weights);
    for (int k = 0; k < n; ++k)
    {
        for (int a = 0; a < 2; ++a)
        {
            g(a, k) += target.weights[k] * sign(projected(a, k) - target.points(a, k));
        }
    }

    result.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()));
    Eigen::VectorXd& grad = result.gradient;
    const double s = params.camera.scale;
    const auto at = [](const ParameterBlock& b, std::size_t i) { return static_cast<Eigen::Index>(b.offset + i); };

    for (int k = 0; k < n; ++k)
    {
        const Eigen::Vector2d gk = g.col(k);
        if (gk.isZero(0.0))
        {
            continue;
        }
        grad[at(layout.camera_translation, 0)] += gk.x();
        grad[at(layout.camera_translation, 1)] += gk.y();
        grad[at(layout.camera_scale, 0)] += gk.dot(posed.col(k).head<2>());

        const Eigen::Vector3d q(s * gk.x(), s * gk.y(), 0.0);
        for (int m = 0; m < 3; ++m)
        {
            grad[at(layout.pose, static_cast<std::size_t>(m))] += q.dot(drg[m] * jawed.col(k));
        }
        const Eigen::Vector3d r = rg.transpose() * q;
        const int vertex = asset.landmark_indices[k];
        const double w = asset.jaw_region_mask[vertex];
        if (w != 0.0)
        {
            const Eigen::Vector3d d = unposed.col(k) - asset.jaw_pivot;
            for (int m = 0; m < 3; ++m)
            {
                grad[at(layout.pose, static_cast<std::size_t>(3 + m))] += w * r.dot(drj[m] * d);
            }
        }
        const Eigen::Vector3d u = ((1.0 - w) * identity + w * rj).transpose() * r;
        const Eigen::Index row = 3 * static_cast<Eigen::Index>(vertex);
        grad.segment(at(layout.shape, 0), static_cast<Eigen::Index>(layout.shape.size)) +=
            asset.identity_basis.middleRows<3>(row).transpose() * u;
        grad.segment(at(layout.expression, 0), static_cast<Eigen::Index>(layout.expression.size)) +=
            asset.expression_basis.middleRows<3>(row).transpose() * u;
    }
    return result;
}

namespace {

struct DetailLandmarks
{
    Eigen::Matrix2Xd projected;
    Eigen::Matrix3Xd normals;
};

DetailLandmarks detail_landmarks(const model::ModelParams& params, const model::HeadModelAsset& asset,
                                 double magnitude)
{
    params.validate(asset);
    const model::Mesh coarse = model::evaluate_model(params, asset);
    const Eigen::VectorXd field = model::detail_field(params.detail, asset);
    DetailLandmarks out;
    out.normals.resize(3, losses::landmark_count);
    Eigen::Matrix3Xd moved(3, losses::landmark_count);
    for (int k = 0; k < losses::landmark_count; ++k)
    {
        const int v = asset.landmark_indices[k];
        out.normals.col(k) = coarse.normals.col(v);
        moved.col(k) = coarse.positions.col(v) + (magnitude * field[v]) * coarse.normals.col(v);
    }
    out.projected = render::project_vertices(moved, params.camera);
    return out;
}

} // namespace

Eigen::Matrix2Xd detailed_landmark_projection(const model::ModelParams& params, const model::HeadModelAsset& asset,
                                              double magnitude)
{
    return detail_landmarks(params, asset, magnitude).projected;
}

GradientResult detail_mutual_distance_gradient(const model::ModelParams& params, const model::HeadModelAsset& asset,
                                               const losses::LandmarkSet& target, const losses::PairSpec& pairs,
                                               const losses::LossWeights& weights, double magnitude)
{
    target.validate();
    const DetailLandmarks lm = detail_landmarks(params, asset, magnitude);
    GradientResult result;
    result.value = losses::mutual_distance_loss(target, lm.projected, pairs, weights);
    const Eigen::Matrix2Xd g = mutual_distance_pixel_gradient(target, lm.projected, pairs, weights);
    result.gradient = Eigen::VectorXd::Zero(asset.detail_dims());
    for (int k = 0; k < losses::landmark_count; ++k)
    {
        const double along = params.camera.scale * magnitude * g.col(k).dot(lm.normals.col(k).head<2>());
        if (along != 0.0)
        {
            result.gradient += along * asset.detail_basis.row(asset.landmark_indices[k]).transpose();
        }
    }
    return result;
}

Eigen::VectorXd fd_gradients(const std::function<double(const Eigen::VectorXd&)>& objective, const Eigen::VectorXd& x,
                             double step, const std::vector<Eigen::Index>& coordinates)
{
    if (!(step > 0.0) || !std::isfinite(step))
    {
        throw ValidationError("fd_step", "must be positive and finite");
    }
    std::vector<Eigen::Index> coords = coordinates;
    if (coords.empty())
    {
        coords.resize(static_cast<std::size_t>(x.size()));
        std::iota(coords.begin(), coords.end(), Eigen::Index{0});
    }
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd probe = x;
    for (const Eigen::Index i : coords)
    {
        if (i < 0 || i >= x.size())
        {
            throw ConfigurationError("finite-difference coordinate out of range");
        }
        probe[i] = x[i] + step;
        const double plus = objective(probe);
        probe[i] = x[i] - step;
        const double minus = objective(probe);
        probe[i] = x[i];
        if (!std::isfinite(plus) || !std::isfinite(minus))
        {
            throw OptimizationError("non-finite objective at finite-difference probe of coordinate " +
                                    std::to_string(i));
        }
        grad[i] = (plus - minus) / (2.0 * step);
    }
    return grad;
}

} // namespace fitting
} // namespace sk13
