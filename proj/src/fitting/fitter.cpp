/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/fitting/fitter.cpp
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
#include "sk13/fitting/fitter.hpp"
#include "sk13/core/error.hpp"
#include "sk13/fitting/gradients.hpp"
#include "sk13/render/camera.hpp"
#include "sk13/render/sh_lighting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace sk13 {
namespace fitting {

void FitConfig::validate() const
{
    if (coarse_iters < 0)
    {
        throw ValidationError("coarse_iters", "must be >= 0");
    }
    if (detail_iters < 0)
    {
        throw ValidationError("detail_iters", "must be >= 0");
    }
    if (render_size < 32)
    {
        throw ValidationError("render_size", "must be >= 32");
    }
    if (!(fd_step > 0.0) || !std::isfinite(fd_step))
    {
        throw ValidationError("fd_step", "must be positive and finite");
    }
    if (!std::isfinite(detail_magnitude) || detail_magnitude < 0.0)
    {
        throw ValidationError("detail_magnitude", "must be finite and non-negative");
    }
    adam().validate();
    loss_weights.validate();
    pairs.validate();
    gctd.validate();
}

bool FitReport::same_result(const FitReport& other) const
{
    auto same_terms = [](const losses::LossTerms& a, const losses::LossTerms& b) {
        return a.landmark == b.landmark && a.mutual_distance == b.mutual_distance && a.photometric == b.photometric &&
               a.regularization == b.regularization;
    };
    return stage == other.stage && iterations == other.iterations && objective == other.objective &&
           best_objective == other.best_objective && same_terms(initial_terms, other.initial_terms) &&
           same_terms(final_terms, other.final_terms) && initial_objective == other.initial_objective &&
           final_objective == other.final_objective && converged == other.converged && seed == other.seed &&
           projected_landmarks.cols() == other.projected_landmarks.cols() &&
           projected_landmarks == other.projected_landmarks;
}

double mean_landmark_error(const Eigen::Matrix2Xd& a, const Eigen::Matrix2Xd& b)
{
    if (a.cols() != b.cols() || a.cols() == 0)
    {
        throw ValidationError("landmarks", "landmark sets differ in size");
    }
    return (a - b).colwise().norm().mean();
}

namespace {

using Clock = std::chrono::steady_clock;

/// The input brought to the photometric resolution, plus the factor between the two.
struct Target
{
    Image image;
    double factor = 1.0;
};

Target prepare_target(const Image& sketch, const FitConfig& cfg)
{
    if (sketch.empty())
    {
        throw ValidationError("sketch", "image is empty");
    }
    Image gray = to_grayscale(sketch);
    clamp_unit(gray);
    if (cfg.enhance_input)
    {
        gray = gctd::enhance(gray, cfg.gctd);
    }
    Target t;
    t.factor = static_cast<double>(cfg.render_size) / std::max(gray.width, gray.height);
    const int w = std::max(1, static_cast<int>(std::lround(gray.width * t.factor)));
    const int h = std::max(1, static_cast<int>(std::lround(gray.height * t.factor)));
    t.image = (w == gray.width && h == gray.height) ? gray : resample_bilinear(gray, w, h);
    return t;
}

const losses::LandmarkSet* active_landmarks(const std::optional<losses::LandmarkSet>& landmarks, const FitConfig& cfg)
{
    if (!cfg.use_landmarks)
    {
        return nullptr;
    }
    if (!landmarks)
    {
        throw ValidationError("landmarks", "required when use_landmarks is set");
    }
    landmarks->validate();
    return &*landmarks;
}

render::RenderedImage finish_render(render::RenderedImage rendered, render::RenderMode mode)
{
    rendered.pixels = to_grayscale(rendered.pixels);
    if (mode == render::RenderMode::sketch)
    {
        rendered.pixels = render::sketch_from_shaded(rendered.pixels, rendered.mask);
    }
    return rendered;
}

/**
 * Photometric loss of coarse parameters. After prime(), parameters that share the primed
 * geometry and camera reuse its coverage and normals, so albedo and lighting probes only
 * re-shade from cached per-pixel SH bases. The result is the same as a full render.
 */
class CoarsePhotometric
{
public:
    CoarsePhotometric(const Target& target, const model::HeadModelAsset& asset, render::RenderMode mode)
        : target_(target), asset_(asset), mode_(mode)
    {
    }

    double prime(const model::ModelParams& p)
    {
        primed_ = p;
        mesh_ = model::evaluate_model(p, asset_);
        const render::CameraParams cam = p.camera.rescaled(target_.factor);
        const Eigen::Matrix2Xd projected = render::project_vertices(mesh_.positions, cam);
        const Eigen::VectorXd depths = mesh_.positions.row(2).transpose();
        coverage_ = render::rasterize_coverage(projected, std::span(depths.data(), depths.size()), mesh_.triangles,
                                               target_.image.width, target_.image.height);
        basis_ = render::pixel_sh_basis(coverage_, mesh_.triangles, mesh_.normals);
        return shade(mesh_.colors, p.lighting);
    }

    double operator()(const model::ModelParams& p) const
    {
        if (primed_ && same_geometry(p, *primed_))
        {
            return shade(model::evaluate_colors(p, asset_), p.lighting);
        }
        const model::Mesh mesh = model::evaluate_model(p, asset_);
        const render::RenderedImage rendered =
            render::render_sketch(mesh, p.camera.rescaled(target_.factor), p.lighting, target_.image.width,
                                  target_.image.height, mode_);
        return losses::photometric_loss(target_.image, rendered);
    }

private:
    static bool same_geometry(const model::ModelParams& a, const model::ModelParams& b)
    {
        return a.shape == b.shape && a.pose == b.pose && a.expression == b.expression && a.camera == b.camera;
    }

    double shade(const Eigen::Matrix3Xd& colors, const Eigen::Matrix<double, 27, 1>& lighting) const
    {
        const render::RenderedImage rendered =
            finish_render(render::shade_with_basis(coverage_, mesh_.triangles, basis_, colors, lighting), mode_);
        return losses::photometric_loss(target_.image, rendered);
    }

    const Target& target_;
    const model::HeadModelAsset& asset_;
    render::RenderMode mode_;
    std::optional<model::ModelParams> primed_;
    model::Mesh mesh_;
    render::Coverage coverage_;
    std::vector<std::array<double, 9>> basis_;
};

void check_finite(double value, int iteration)
{
    if (!std::isfinite(value))
    {
        throw OptimizationError("non-finite objective at iteration " + std::to_string(iteration));
    }
}

bool has_converged(const std::vector<double>& best)
{
    const std::size_t n = best.size();
    if (n < 2)
    {
        return false;
    }
    const std::size_t window = std::max<std::size_t>(1, (n - 1) / 10);
    const double before = best[n - 1 - window];
    const double after = best[n - 1];
    return before - after <= 1e-4 * std::max(std::abs(before), 1e-12);
}

void finish_report(FitReport& report, Clock::time_point start)
{
    report.converged = has_converged(report.best_objective);
    report.final_objective = report.best_objective.back();
    report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

model::ModelParams initial_params(const model::HeadModelAsset& asset, int width, int height,
                                  const std::optional<losses::LandmarkSet>& landmarks)
{
    if (width <= 0 || height <= 0)
    {
        throw ValidationError("sketch", "image is empty");
    }
    model::ModelParams p = model::ModelParams::zeros(asset);
    p.lighting = render::neutral_lighting();
    if (!landmarks)
    {
        p.camera.scale = 0.4 * std::min(width, height);
        p.camera.translation = Eigen::Vector2d(0.5 * width, 0.5 * height);
        return p;
    }
    landmarks->validate();
    const Eigen::Matrix2Xd tmpl = model::evaluate_landmark_positions(p, asset).topRows<2>();
    const Eigen::Vector2d tmin = tmpl.rowwise().minCoeff();
    const Eigen::Vector2d tmax = tmpl.rowwise().maxCoeff();
    const Eigen::Vector2d gmin = landmarks->points.rowwise().minCoeff();
    const Eigen::Vector2d gmax = landmarks->points.rowwise().maxCoeff();
    const Eigen::Vector2d textent = tmax - tmin;
    const Eigen::Vector2d gextent = gmax - gmin;
    if (!(textent.minCoeff() > 0.0) || !(gextent.minCoeff() > 0.0))
    {
        throw ValidationError("landmarks", "landmark bounding box is degenerate");
    }
    p.camera.scale = 0.5 * (gextent.x() / textent.x() + gextent.y() / textent.y());
    p.camera.translation = 0.5 * (gmin + gmax) - p.camera.scale * 0.5 * (tmin + tmax);
    return p;
}

FitResult fit_coarse(const Image& sketch, const std::optional<losses::LandmarkSet>& landmarks,
                     const model::HeadModelAsset& asset, const FitConfig& cfg)
{
    const auto start = Clock::now();
    cfg.validate();
    const losses::LandmarkSet* target_landmarks = active_landmarks(landmarks, cfg);
    const Target target = prepare_target(sketch, cfg);

    const model::ModelParams init = initial_params(
        asset, sketch.width, sketch.height, target_landmarks ? std::optional(*target_landmarks) : std::nullopt);
    const CoarseLayout layout(asset);
    std::vector<ParameterBlock> blocks = layout.blocks();
    const BlockLearningRates& rates = cfg.block_rates;
    const double scales[] = {rates.shape,    rates.pose,         rates.expression,        rates.albedo,
                             rates.lighting, rates.camera_scale, rates.camera_translation};
    for (std::size_t i = 0; i < blocks.size(); ++i)
    {
        blocks[i].lr_scale = scales[i];
    }

    const Eigen::Index scale_index = static_cast<Eigen::Index>(layout.camera_scale.offset);
    const double min_scale = 1e-3 * init.camera.scale;

    CoarsePhotometric photometric(target, asset, cfg.render_mode);
    const losses::LossWeights& w = cfg.loss_weights;
    const AdamConfig adam = cfg.adam();
    AdamState state(layout.size());

    Eigen::VectorXd x = pack_coarse(init, layout);
    Eigen::VectorXd best_x = x;
    FitReport report;
    report.stage = "coarse";
    report.seed = cfg.seed;
    report.iterations = cfg.coarse_iters;
    double best = 0.0;

    for (int it = 0;; ++it)
    {
        const model::ModelParams p = unpack_coarse(x, layout, init);
        losses::LossTerms terms;
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
        if (target_landmarks)
        {
            const GradientResult lg = analytic_gradients(p, asset, *target_landmarks, cfg.pairs, w);
            const Eigen::Matrix2Xd projected = render::project_vertices(
                model::evaluate_landmark_positions(p, asset), p.camera);
            terms.landmark = losses::landmark_loss(*target_landmarks, projected);
            terms.mutual_distance = losses::mutual_distance_loss(*target_landmarks, projected, cfg.pairs, w);
            grad += lg.gradient;
        }
        terms.photometric = photometric.prime(p);
        terms.regularization = losses::regularization(p, losses::Stage::coarse);
        const double objective = losses::coarse_objective(terms, w);
        check_finite(objective, it);

        report.objective.push_back(objective);
        if (it == 0 || objective < best)
        {
            best = objective;
            best_x = x;
            report.final_terms = terms;
        }
        report.best_objective.push_back(best);
        if (it == 0)
        {
            report.initial_terms = terms;
            report.initial_objective = objective;
        }
        if (it == cfg.coarse_iters)
        {
            break;
        }

        if (w.photometric != 0.0)
        {
            const auto f = [&](const Eigen::VectorXd& probe) { return photometric(unpack_coarse(probe, layout, init)); };
            grad += w.photometric * fd_gradients(f, x, cfg.fd_step);
        }
        const auto add_reg = [&](const ParameterBlock& b) {
            const auto seg = Eigen::seqN(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size));
            grad(seg) += 2.0 * w.regularization * x(seg);
        };
        add_reg(layout.shape);
        add_reg(layout.expression);
        add_reg(layout.albedo);

        adam_step(state, std::span(x.data(), static_cast<std::size_t>(x.size())),
                  std::span<const double>(grad.data(), static_cast<std::size_t>(grad.size())), adam, blocks);
        x[scale_index] = std::max(x[scale_index], min_scale);
    }

    FitResult result;
    result.params = unpack_coarse(best_x, layout, init);
    result.report = std::move(report);
    result.report.projected_landmarks =
        render::project_vertices(model::evaluate_landmark_positions(result.params, asset), result.params.camera);
    finish_report(result.report, start);
    return result;
}

FitResult fit_detail(const Image& sketch, const model::ModelParams& coarse,
                     const std::optional<losses::LandmarkSet>& landmarks, const model::HeadModelAsset& asset,
                     const FitConfig& cfg)
{
    const auto start = Clock::now();
    cfg.validate();
    coarse.validate(asset);
    const losses::LandmarkSet* target_landmarks = active_landmarks(landmarks, cfg);
    const Target target = prepare_target(sketch, cfg);

    const model::Mesh coarse_mesh = model::evaluate_model(coarse, asset);
    const render::CameraParams cam = coarse.camera.rescaled(target.factor);
    const auto photometric = [&](const Eigen::VectorXd& delta) {
        const model::Mesh mesh = model::apply_detail(coarse_mesh, delta, asset, cfg.detail_magnitude);
        const render::RenderedImage rendered = render::render_sketch(
            mesh, cam, coarse.lighting, target.image.width, target.image.height, cfg.render_mode);
        return losses::photometric_loss(target.image, rendered);
    };

    const losses::LossWeights& w = cfg.loss_weights;
    const AdamConfig adam = cfg.adam();
    const std::vector<ParameterBlock> blocks = {
        {"detail", 0, static_cast<std::size_t>(asset.detail_dims()), cfg.block_rates.detail}};
    AdamState state(static_cast<std::size_t>(asset.detail_dims()));

    Eigen::VectorXd x = coarse.detail;
    Eigen::VectorXd best_x = x;
    FitReport report;
    report.stage = "detail";
    report.seed = cfg.seed;
    report.iterations = cfg.detail_iters;
    double best = 0.0;
    model::ModelParams p = coarse;

    for (int it = 0;; ++it)
    {
        p.detail = x;
        losses::LossTerms terms;
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
        if (target_landmarks)
        {
            const GradientResult md =
                detail_mutual_distance_gradient(p, asset, *target_landmarks, cfg.pairs, w, cfg.detail_magnitude);
            terms.mutual_distance = md.value;
            grad += md.gradient;
        }
        terms.photometric = photometric(x);
        terms.regularization = losses::regularization(p, losses::Stage::detail);
        const double objective = losses::detail_objective(terms, w);
        check_finite(objective, it);

        report.objective.push_back(objective);
        if (it == 0 || objective < best)
        {
            best = objective;
            best_x = x;
            report.final_terms = terms;
        }
        report.best_objective.push_back(best);
        if (it == 0)
        {
            report.initial_terms = terms;
            report.initial_objective = objective;
        }
        if (it == cfg.detail_iters)
        {
            break;
        }
        if (w.photometric != 0.0)
        {
            grad += w.photometric * fd_gradients(photometric, x, cfg.fd_step);
        }
        grad += 2.0 * w.regularization * x;
        adam_step(state, std::span(x.data(), static_cast<std::size_t>(x.size())),
                  std::span<const double>(grad.data(), static_cast<std::size_t>(grad.size())), adam, blocks);
    }

    FitResult result;
    result.params = coarse;
    result.params.detail = best_x;
    result.report = std::move(report);
    result.report.projected_landmarks = detailed_landmark_projection(result.params, asset, cfg.detail_magnitude);
    finish_report(result.report, start);
    return result;
}

Reconstruction reconstruct(const Image& sketch, const std::optional<losses::LandmarkSet>& landmarks,
                           const model::HeadModelAsset& asset, const FitConfig& cfg)
{
    cfg.validate();
    FitConfig inner = cfg;
    inner.enhance_input = false;
    Image prepared = to_grayscale(sketch);
    clamp_unit(prepared);
    if (cfg.enhance_input)
    {
        prepared = gctd::enhance(prepared, cfg.gctd);
    }
    FitResult coarse = fit_coarse(prepared, landmarks, asset, inner);
    FitResult detail = fit_detail(prepared, coarse.params, landmarks, asset, inner);

    Reconstruction out;
    out.params = detail.params;
    out.mesh = model::apply_detail(model::evaluate_model(out.params, asset), out.params.detail, asset,
                                   cfg.detail_magnitude);
    out.coarse = std::move(coarse.report);
    out.detail = std::move(detail.report);
    return out;
}

} // namespace fitting
} // namespace sk13
