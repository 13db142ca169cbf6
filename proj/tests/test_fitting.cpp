/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: tests/test_fitting.cpp
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
#include "gradient_oracle.hpp"
#include "test_support.hpp"

#include "sk13/core/error.hpp"
#include "sk13/dataset/synthetic.hpp"
#include "sk13/fitting/adam.hpp"
#include "sk13/fitting/fitter.hpp"
#include "sk13/fitting/gradients.hpp"
#include "sk13/render/rasterizer.hpp"
#include "sk13/render/sh_lighting.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace sk13;
using namespace sk13::fitting;

namespace {

// The bias-corrected Adam rule for one scalar, written out.
struct ScalarAdam
{
    double m = 0.0;
    double v = 0.0;
    int t = 0;
    double step(double x, double g, double lr)
    {
        ++t;
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mh = m / (1.0 - std::pow(0.9, t));
        const double vh = v / (1.0 - std::pow(0.999, t));
        return x - lr * mh / (std::sqrt(vh) + 1e-8);
    }
};

FitConfig quick_config(int coarse, int detail)
{
    FitConfig cfg;
    cfg.coarse_iters = coarse;
    cfg.detail_iters = detail;
    cfg.render_size = 64;
    return cfg;
}

} // namespace

TEST_CASE("adam leaves parameters alone for zero gradients")
{
    std::vector<double> x = {1.0, -2.0, 3.5};
    const std::vector<double> g(3, 0.0);
    AdamState state(3);
    for (int i = 0; i < 10; ++i)
    {
        adam_step(state, x, g, AdamConfig{});
    }
    CHECK(x == std::vector<double>{1.0, -2.0, 3.5});
    CHECK(state.step == 10);
}

TEST_CASE("adam minimizes a quadratic and follows the update rule")
{
    std::vector<double> x = {1.0};
    AdamState state(1);
    AdamConfig cfg;
    cfg.learning_rate = 0.1;
    ScalarAdam oracle;
    double y = 1.0;
    for (int i = 0; i < 200; ++i)
    {
        const std::vector<double> g = {2.0 * x[0]};
        adam_step(state, x, g, cfg);
        y = oracle.step(y, 2.0 * y, 0.1);
        CHECK(std::abs(x[0] - y) < 1e-12);
    }
    CHECK(std::abs(x[0]) < 1e-3);
}

TEST_CASE("adam block learning-rate scales")
{
    std::vector<double> x = {0.0, 0.0};
    const std::vector<double> g = {1.0, 1.0};
    AdamState state(2);
    const std::vector<ParameterBlock> blocks = {{"a", 0, 1, 1.0}, {"b", 1, 1, 3.0}};
    adam_step(state, x, g, AdamConfig{}, blocks);
    CHECK(x[1] == doctest::Approx(3.0 * x[0]).epsilon(1e-12));
    CHECK(x[0] < 0.0);
}

TEST_CASE("adam rejects non-finite gradients and names the block")
{
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> g = {0.1, 0.1, std::nan(""), 0.1};
    AdamState state(4);
    const std::vector<ParameterBlock> blocks = {{"shape", 0, 2, 1.0}, {"pose", 2, 2, 1.0}};
    try
    {
        adam_step(state, x, g, AdamConfig{}, blocks);
        FAIL("expected an optimization error");
    }
    catch (const OptimizationError& e)
    {
        CHECK(std::string(e.what()).find("pose") != std::string::npos);
    }
    CHECK(x == std::vector<double>{1.0, 2.0, 3.0, 4.0});
    CHECK(state.step == 0);

    const std::vector<double> short_g = {0.1};
    CHECK_THROWS(adam_step(state, x, short_g, AdamConfig{}));
}

TEST_CASE("adam is deterministic")
{
    auto run = [] {
        std::vector<double> x = {0.3, -0.7, 1.1};
        AdamState state(3);
        std::vector<double> trace;
        for (int i = 0; i < 50; ++i)
        {
            const std::vector<double> g = {std::sin(x[0]), x[1] * x[2], x[2] - 1.0};
            adam_step(state, x, g, AdamConfig{});
            trace.insert(trace.end(), x.begin(), x.end());
        }
        return trace;
    };
    CHECK(run() == run());
}

TEST_CASE("finite differences")
{
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 2.0);
    const auto linear = fd_gradients([](const Eigen::VectorXd& v) { return 3.0 * v[0]; }, x, 1e-3);
    CHECK(std::abs(linear[0] - 3.0) < 1e-9);
    const auto quadratic = fd_gradients([](const Eigen::VectorXd& v) { return v[0] * v[0]; }, x, 1e-3);
    CHECK(std::abs(quadratic[0] - 4.0) < 1e-6);

    const Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
    const auto partial =
        fd_gradients([](const Eigen::VectorXd& v) { return v[0] + 2 * v[1] + 3 * v[2]; }, y, 1e-3, {2});
    CHECK(partial[0] == 0.0);
    CHECK(partial[1] == 0.0);
    CHECK(std::abs(partial[2] - 3.0) < 1e-9);

    CHECK_THROWS_AS(fd_gradients([](const Eigen::VectorXd& v) { return std::log(v[0]); },
                                 Eigen::VectorXd::Zero(1), 1e-3),
                    OptimizationError);
    CHECK_THROWS_AS(fd_gradients([](const Eigen::VectorXd& v) { return v[0]; }, x, 0.0), ValidationError);
}

TEST_CASE("coarse layout packs and unpacks")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const CoarseLayout layout(asset);
    CHECK(layout.size() == static_cast<std::size_t>(20 + 6 + 10 + 10 + 27 + 1 + 2));
    const testing::GradientCase c = testing::random_gradient_case(asset, losses::PairSpec::standard(), 1);
    model::ModelParams p = c.params;
    p.detail[3] = 0.5;
    p.lighting[4] = 0.25;
    const model::ModelParams back = unpack_coarse(pack_coarse(p, layout), layout, p);
    CHECK(back == p);
    const auto blocks = layout.blocks();
    CHECK(blocks.size() == 7);
    CHECK(blocks.front().name == "shape");
}

TEST_CASE("analytic landmark gradients match central differences")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const losses::PairSpec pairs = losses::PairSpec::standard();
    const losses::LossWeights weights;
    const CoarseLayout layout(asset);
    for (std::uint64_t seed = 1; seed <= 8; ++seed)
    {
        const testing::GradientCase c = testing::random_gradient_case(asset, pairs, seed);
        const GradientResult analytic = analytic_gradients(c.params, asset, c.target, pairs, weights);
        const auto objective = [&](const Eigen::VectorXd& x) {
            return testing::landmark_objective(x, layout, c.params, asset, c.target, pairs, weights);
        };
        const Eigen::VectorXd x = pack_coarse(c.params, layout);
        CHECK(testing::rel_err(analytic.value, objective(x)) < 1e-12);
        const Eigen::VectorXd fd = fd_gradients(objective, x, 1e-5);
        CHECK(testing::max_relative_error(analytic.gradient, fd) < 1e-4);
    }
}

TEST_CASE("perfect fit has zero gradient")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const testing::GradientCase c = testing::random_gradient_case(asset, losses::PairSpec::standard(), 3);
    const losses::LandmarkSet exact(testing::projected_landmarks(c.params, asset));
    const GradientResult g = analytic_gradients(c.params, asset, exact, losses::PairSpec::standard(), {});
    CHECK(g.value == 0.0);
    CHECK(g.gradient.isZero(0.0));
}

TEST_CASE("mutual distance contributes nothing to the translation gradient")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const losses::PairSpec pairs = losses::PairSpec::standard();
    const CoarseLayout layout(asset);
    for (std::uint64_t seed = 20; seed < 30; ++seed)
    {
        const testing::GradientCase c = testing::random_gradient_case(asset, pairs, seed);
        const GradientResult g = analytic_gradients(c.params, asset, c.target, pairs, {});
        const Eigen::Matrix2Xd p = testing::projected_landmarks(c.params, asset);
        // Landmark weights are multiples of 1/2, so this sum is exact in any order.
        Eigen::Vector2d landmark_only = Eigen::Vector2d::Zero();
        for (int i = 0; i < 68; ++i)
        {
            for (int a = 0; a < 2; ++a)
            {
                const double r = p(a, i) - c.target.points(a, i);
                landmark_only[a] += c.target.weights[i] * ((r > 0) - (r < 0));
            }
        }
        CHECK(g.gradient[layout.camera_translation.offset] == landmark_only[0]);
        CHECK(g.gradient[layout.camera_translation.offset + 1] == landmark_only[1]);
    }
}

TEST_CASE("detail mutual distance gradient matches central differences")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const losses::PairSpec pairs = losses::PairSpec::standard();
    const losses::LossWeights weights;
    const testing::GradientCase c = testing::random_gradient_case(asset, pairs, 5);
    model::ModelParams p = c.params;
    for (Eigen::Index i = 0; i < p.detail.size(); ++i)
    {
        p.detail[i] = 0.05 * std::cos(1.0 + i);
    }
    const double magnitude = 1.0;
    const GradientResult g = detail_mutual_distance_gradient(p, asset, c.target, pairs, weights, magnitude);
    const auto objective = [&](const Eigen::VectorXd& delta) {
        model::ModelParams q = p;
        q.detail = delta;
        return testing::mutual_distance_oracle(c.target, detailed_landmark_projection(q, asset, magnitude), pairs,
                                               weights);
    };
    CHECK(testing::rel_err(g.value, objective(p.detail)) < 1e-12);
    CHECK(testing::max_relative_error(g.gradient, fd_gradients(objective, p.detail, 1e-5)) < 1e-4);

    // Zero code: the detailed projection is the coarse one.
    model::ModelParams coarse = p;
    coarse.detail.setZero();
    const Eigen::Matrix2Xd a = detailed_landmark_projection(coarse, asset, magnitude);
    CHECK((a - testing::projected_landmarks(coarse, asset)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("photometric finite differences are consistent across step sizes")
{
    // Shading coordinates on a shaded render: the objective is smooth there. Geometry
    // coordinates move pixel ownership in discrete steps and are not expected to agree.
    const model::HeadModelAsset& asset = testing::desk_asset();
    const CoarseLayout layout(asset);
    int compared = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
    {
        const dataset::SyntheticPair truth = dataset::generate_synthetic_pair(asset, 100 + seed, 64);
        model::ModelParams p = dataset::generate_synthetic_pair(asset, 200 + seed, 64).params;
        p.camera = truth.params.camera;
        const Eigen::VectorXd x = pack_coarse(p, layout);
        const auto objective = [&](const Eigen::VectorXd& v) {
            const model::ModelParams q = unpack_coarse(v, layout, p);
            const render::RenderedImage r = render::render_sketch(model::evaluate_model(q, asset), q.camera,
                                                                  q.lighting, 64, 64, render::RenderMode::shaded);
            return losses::photometric_loss(truth.sketch, r);
        };
        std::vector<Eigen::Index> shading;
        for (const ParameterBlock* b : {&layout.albedo, &layout.lighting})
        {
            for (std::size_t k = 0; k < b->size; ++k)
            {
                shading.push_back(static_cast<Eigen::Index>(b->offset + k));
            }
        }
        const Eigen::VectorXd big = fd_gradients(objective, x, 1e-3, shading);
        const Eigen::VectorXd small = fd_gradients(objective, x, 5e-4, shading);
        for (Eigen::Index i : shading)
        {
            const double scale = std::max(std::abs(big[i]), std::abs(small[i]));
            if (scale > 1e-4)
            {
                ++compared;
                CHECK(std::abs(big[i] - small[i]) / scale < 5e-2);
            }
        }
    }
    CHECK(compared > 50);
}

TEST_CASE("fit configuration validation")
{
    FitConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.render_size = 16;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.coarse_iters = -1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.learning_rate = 0.0;
    CHECK_THROWS(cfg.validate());

    const model::HeadModelAsset& asset = testing::desk_asset();
    const Image sketch(64, 64, 1, 1.0);
    CHECK_THROWS_AS(fit_coarse(sketch, std::nullopt, asset, quick_config(1, 0)), ValidationError);
    CHECK_THROWS_AS(fit_coarse(Image(), std::nullopt, asset, quick_config(1, 0)), ValidationError);
}

TEST_CASE("initialization")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const model::ModelParams blank = initial_params(asset, 100, 80, std::nullopt);
    CHECK(blank.shape.isZero(0.0));
    CHECK(blank.pose.isZero(0.0));
    CHECK(blank.detail.isZero(0.0));
    CHECK(blank.lighting == render::neutral_lighting());
    CHECK(blank.camera.translation == Eigen::Vector2d(50.0, 40.0));
    CHECK(blank.camera.scale == doctest::Approx(32.0));

    // With landmarks the template's landmark box is mapped onto the target's.
    const dataset::SyntheticPair pair = dataset::generate_synthetic_pair(asset, 4, 128, 0.0);
    const model::ModelParams init = initial_params(asset, 128, 128, pair.landmarks);
    const Eigen::Matrix2Xd p = testing::projected_landmarks(init, asset);
    const Eigen::Vector2d lo = pair.landmarks.points.rowwise().minCoeff();
    const Eigen::Vector2d hi = pair.landmarks.points.rowwise().maxCoeff();
    const Eigen::Vector2d centre_gap = 0.5 * (p.rowwise().minCoeff() + p.rowwise().maxCoeff()) - 0.5 * (lo + hi);
    CHECK(centre_gap.norm() < 0.1 * (hi - lo).norm());
}

TEST_CASE("zero iterations return the initialization")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const dataset::SyntheticPair pair = dataset::generate_synthetic_pair(asset, 6, 64);
    const FitResult coarse = fit_coarse(pair.sketch, pair.landmarks, asset, quick_config(0, 0));
    CHECK(coarse.params == initial_params(asset, 64, 64, pair.landmarks));
    CHECK(coarse.report.iterations == 0);
    CHECK(coarse.report.objective.size() == 1);
    CHECK(coarse.report.final_objective == coarse.report.initial_objective);

    const FitResult detail = fit_detail(pair.sketch, coarse.params, pair.landmarks, asset, quick_config(0, 0));
    CHECK(detail.params.detail.isZero(0.0));
    CHECK(detail.params == coarse.params);
    CHECK(detail.report.objective.size() == 1);
}

TEST_CASE("short fits are deterministic and never worsen the best objective")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const dataset::SyntheticPair pair = dataset::generate_synthetic_pair(asset, 7, 64);
    const FitConfig cfg = quick_config(6, 4);
    const FitResult a = fit_coarse(pair.sketch, pair.landmarks, asset, cfg);
    const FitResult b = fit_coarse(pair.sketch, pair.landmarks, asset, cfg);
    CHECK(a.params == b.params);
    CHECK(a.report.same_result(b.report));
    CHECK(a.report.objective.size() == 7);
    CHECK(a.report.final_objective <= a.report.initial_objective);
    for (std::size_t i = 1; i < a.report.best_objective.size(); ++i)
    {
        CHECK(a.report.best_objective[i] <= a.report.best_objective[i - 1]);
    }
    CHECK(a.report.final_objective == a.report.best_objective.back());

    const FitResult da = fit_detail(pair.sketch, a.params, pair.landmarks, asset, cfg);
    const FitResult db = fit_detail(pair.sketch, a.params, pair.landmarks, asset, cfg);
    CHECK(da.params == db.params);
    CHECK(da.report.same_result(db.report));
    // Only the detail code moves.
    model::ModelParams frozen = da.params;
    frozen.detail = a.params.detail;
    CHECK(frozen == a.params);
}

TEST_CASE("coarse fit recovers a synthetic head")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const dataset::SyntheticPair pair = dataset::generate_synthetic_pair(asset, 1, 128);
    FitConfig cfg;
    cfg.coarse_iters = 100;
    const FitResult fit = fit_coarse(pair.sketch, pair.landmarks, asset, cfg);
    CHECK(fit.report.final_objective < 0.1 * fit.report.initial_objective);
    CHECK(mean_landmark_error(fit.report.projected_landmarks, pair.landmarks.points) < 2.0);
}

TEST_CASE("detail fit lowers its objective on a target with detail")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    const int size = 128;
    const dataset::SyntheticPair pair = dataset::generate_synthetic_pair(asset, 2, size);
    model::ModelParams truth = pair.params;
    for (Eigen::Index i = 0; i < truth.detail.size(); ++i)
    {
        truth.detail[i] = 0.08 * std::sin(2.0 + 3.0 * i);
    }
    const model::Mesh detailed = model::apply_detail(model::evaluate_model(truth, asset), truth.detail, asset, 1.0);
    const Image target = render::render_sketch(detailed, truth.camera, truth.lighting, size, size).pixels;
    const losses::LandmarkSet landmarks(detailed_landmark_projection(truth, asset, 1.0));

    model::ModelParams coarse = truth;
    coarse.detail.setZero();
    FitConfig cfg;
    cfg.detail_iters = 30;
    cfg.enhance_input = false;
    const FitResult fit = fit_detail(target, coarse, landmarks, asset, cfg);
    CHECK(fit.report.final_objective < fit.report.initial_objective);
}

TEST_CASE("blank sketch without landmarks stays near the template")
{
    const model::HeadModelAsset& asset = testing::desk_asset();
    FitConfig cfg = quick_config(20, 5);
    cfg.use_landmarks = false;
    const Reconstruction r = reconstruct(Image(64, 64, 1, 1.0), std::nullopt, asset, cfg);
    CHECK(r.mesh.vertex_count() == asset.vertex_count);
    CHECK(r.mesh.positions.allFinite());

    // Unposed shape against the template, relative to the head's bounding-box diagonal.
    model::ModelParams unposed = r.params;
    unposed.pose.setZero();
    const Eigen::Matrix3Xd shape = model::evaluate_positions(unposed, asset);
    const Eigen::Matrix3Xd tmpl = model::evaluate_positions(model::ModelParams::zeros(asset), asset);
    const double extent = (tmpl.rowwise().maxCoeff() - tmpl.rowwise().minCoeff()).norm();
    const double rms = std::sqrt((shape - tmpl).colwise().squaredNorm().mean());
    CHECK(rms < 0.1 * extent);
}
