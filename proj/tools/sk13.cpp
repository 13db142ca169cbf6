/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: tools/sk13.cpp
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
#include "sk13/adapt/feature_mixing.hpp"
#include "sk13/core/error.hpp"
#include "sk13/core/image_io.hpp"
#include "sk13/dataset/edges.hpp"
#include "sk13/dataset/manifest.hpp"
#include "sk13/dataset/synthetic.hpp"
#include "sk13/fitting/fitter.hpp"
#include "sk13/gctd/gctd.hpp"
#include "sk13/losses/landmarks.hpp"
#include "sk13/losses/metrics.hpp"
#include "sk13/model/head_model.hpp"
#include "sk13/service/json_io.hpp"
#include "sk13/service/service.hpp"
#include "sk13/service/service_config.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sk13;

namespace {

bool is_image_file(const fs::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".pgm";
}

std::vector<fs::path> image_files(const fs::path& dir)
{
    if (!fs::is_directory(dir))
    {
        throw ValidationError(dir.string(), "is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
    {
        if (entry.is_regular_file() && is_image_file(entry.path()))
        {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

struct FitOptions
{
    std::string sketch;
    std::string landmarks;
    std::string asset;
    std::string out_mesh;
    std::string out_params;
    std::string out_report;
    std::string config;
    int iters_coarse = fitting::FitConfig{}.coarse_iters;
    int iters_detail = fitting::FitConfig{}.detail_iters;
    std::uint64_t seed = 0;
    int render_size = fitting::FitConfig{}.render_size;
};

int run_fit(const FitOptions& o)
{
    const model::HeadModelAsset asset = model::load_asset(o.asset);
    const Image sketch = read_image(o.sketch);
    std::optional<losses::LandmarkSet> landmarks;
    if (!o.landmarks.empty())
    {
        landmarks = losses::read_landmarks_csv(o.landmarks);
    }
    fitting::FitConfig cfg;
    if (!o.config.empty())
    {
        std::ifstream in(o.config);
        if (!in)
        {
            throw ValidationError("--config", "cannot open " + o.config);
        }
        service::apply_fit_overrides(cfg, nlohmann::json::parse(in));
    }
    cfg.coarse_iters = o.iters_coarse;
    cfg.detail_iters = o.iters_detail;
    cfg.seed = o.seed;
    cfg.render_size = o.render_size;
    cfg.use_landmarks = landmarks.has_value();

    const fitting::Reconstruction result = fitting::reconstruct(sketch, landmarks, asset, cfg);
    model::write_obj(result.mesh, o.out_mesh);
    model::save_params(result.params, o.out_params);
    if (!o.out_report.empty())
    {
        nlohmann::json report = {{"coarse", service::to_json(result.coarse)},
                                 {"detail", service::to_json(result.detail)},
                                 {"config", service::to_json(cfg)}};
        std::ofstream(o.out_report) << report.dump(2) << '\n';
    }
    std::printf("coarse objective %.6g -> %.6g, detail objective %.6g -> %.6g\n", result.coarse.initial_objective,
                result.coarse.final_objective, result.detail.initial_objective, result.detail.final_objective);
    return 0;
}

struct SynthOptions
{
    std::string photos;
    int model_derived = 0;
    std::string asset;
    std::string out;
    int size = 128;
    double param_scale = 1.0;
    std::uint64_t first_seed = 1;
};

int run_synth(const SynthOptions& o)
{
    const fs::path out(o.out);
    fs::create_directories(out);
    dataset::DatasetManifest manifest;
    if (!o.photos.empty())
    {
        for (const fs::path& photo : image_files(o.photos))
        {
            const std::string stem = photo.stem().string();
            const Image sketch = dataset::synthesize_sketch(to_grayscale(read_image(photo)));
            write_image(sketch, out / (stem + ".png"));
            const fs::path sidecar = photo.parent_path() / (stem + ".csv");
            if (!fs::is_regular_file(sidecar))
            {
                std::fprintf(stderr, "note: %s has no landmark file %s; sketch written, not listed\n",
                             photo.string().c_str(), sidecar.string().c_str());
                continue;
            }
            losses::write_landmarks_csv(losses::read_landmarks_csv(sidecar), out / (stem + ".csv"));
            manifest.entries.push_back(
                {stem + ".png", stem + ".csv", std::nullopt, dataset::Source::photo_derived, 0});
        }
    }
    else
    {
        const model::HeadModelAsset asset = model::load_asset(o.asset);
        for (int i = 0; i < o.model_derived; ++i)
        {
            const std::uint64_t seed = o.first_seed + static_cast<std::uint64_t>(i);
            const dataset::SyntheticPair pair = dataset::generate_synthetic_pair(asset, seed, o.size, o.param_scale);
            const std::string stem = "synth_" + std::to_string(seed);
            write_image(pair.sketch, out / (stem + ".png"));
            losses::write_landmarks_csv(pair.landmarks, out / (stem + ".csv"));
            model::save_params(pair.params, out / (stem + ".sk13p"));
            manifest.entries.push_back(
                {stem + ".png", stem + ".csv", stem + ".sk13p", dataset::Source::model_derived, seed});
        }
    }
    dataset::validate_manifest(manifest, out);
    dataset::write_manifest(manifest, out / "manifest.tsv");
    std::printf("%zu entries written to %s\n", manifest.entries.size(), (out / "manifest.tsv").string().c_str());
    return 0;
}

int run_eval(const std::string& pred_dir, const std::string& target_dir)
{
    const std::vector<fs::path> targets = image_files(target_dir);
    if (targets.empty())
    {
        throw ValidationError("--target", "contains no PNG or PGM images");
    }
    std::printf("path,ssim,gmsd\n");
    double ssim_sum = 0.0;
    double gmsd_sum = 0.0;
    for (const fs::path& target : targets)
    {
        const fs::path pred = fs::path(pred_dir) / target.filename();
        if (!fs::is_regular_file(pred))
        {
            throw ValidationError("--pred", "missing prediction " + pred.string());
        }
        const Image a = to_grayscale(read_image(pred));
        const Image b = to_grayscale(read_image(target));
        if (a.width != b.width || a.height != b.height)
        {
            throw ValidationError("--pred", pred.string() + " does not match the size of " + target.string());
        }
        const double s = losses::ssim(a, b);
        const double g = losses::gmsd(a, b);
        ssim_sum += s;
        gmsd_sum += g;
        std::printf("%s,%.10f,%.10f\n", target.filename().string().c_str(), s, g);
    }
    const double n = static_cast<double>(targets.size());
    std::printf("mean,%.10f,%.10f\n", ssim_sum / n, gmsd_sum / n);
    return 0;
}

struct MixOptions
{
    std::string a;
    std::string b;
    std::string out;
    int layer = 1;
    double lambda = 0.5;
    bool sample = false;
    double beta = 0.1;
    std::uint64_t seed = 0;
};

int run_mix(const MixOptions& o)
{
    adapt::MixConfig cfg;
    cfg.beta_param = o.beta;
    cfg.layer = o.layer;
    cfg.seed = o.seed;
    cfg.validate();
    double lambda = o.lambda;
    if (o.sample)
    {
        std::mt19937_64 rng(o.seed);
        lambda = adapt::sample_lambda(cfg, rng);
    }
    const adapt::FeatureMap x = adapt::extract_features(read_image(o.a), o.layer, o.seed);
    const adapt::FeatureMap y = adapt::extract_features(read_image(o.b), o.layer, o.seed);
    const adapt::FeatureMap mixed = adapt::mix_feature_stats(x, y, lambda);
    write_image(adapt::feature_grid(mixed), o.out);
    std::printf("lambda %.6f, %d channels of %dx%d\n", lambda, mixed.channels, mixed.width, mixed.height);
    return 0;
}

service::Service* running_service = nullptr;

void handle_signal(int)
{
    if (running_service != nullptr)
    {
        running_service->stop();
    }
}

struct ServeOptions
{
    std::string config;
    std::string host;
    int port = -1;
    std::string asset;
    std::string store;
    int max_concurrent = 0;
};

int run_serve(const ServeOptions& o)
{
    service::ServiceConfig cfg =
        o.config.empty() ? service::service_config_from_env() : service::load_service_config(o.config);
    if (!o.host.empty())
        cfg.host = o.host;
    if (o.port >= 0)
        cfg.port = o.port;
    if (!o.asset.empty())
        cfg.asset_path = o.asset;
    if (!o.store.empty())
        cfg.store_dir = o.store;
    if (o.max_concurrent > 0)
        cfg.max_concurrent = o.max_concurrent;
    if (cfg.asset_path.empty())
    {
        throw ValidationError("--asset", "an asset is required (flag or config file)");
    }
    model::HeadModelAsset asset = model::load_asset(cfg.asset_path);
    service::Service svc(cfg, std::move(asset));
    svc.start();
    running_service = &svc;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::printf("listening on %s:%d\n", cfg.host.c_str(), cfg.port);
    std::fflush(stdout);
    const bool ok = svc.listen();
    running_service = nullptr;
    svc.stop();
    if (!ok)
    {
        std::fprintf(stderr, "error: cannot listen on %s:%d\n", cfg.host.c_str(), cfg.port);
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"sk13: single-sketch 3D face reconstruction"};
    app.require_subcommand(1);

    FitOptions fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Reconstruct a mesh from one sketch");
    fit_cmd->add_option("--sketch", fit.sketch, "Input sketch (PNG or PGM)")->required();
    fit_cmd->add_option("--landmarks", fit.landmarks, "68-point landmark CSV");
    fit_cmd->add_option("--asset", fit.asset, "Head model asset")->required();
    fit_cmd->add_option("--out-mesh", fit.out_mesh, "Output OBJ")->required();
    fit_cmd->add_option("--out-params", fit.out_params, "Output params file")->required();
    fit_cmd->add_option("--out-report", fit.out_report, "Output fit report (JSON)");
    fit_cmd->add_option("--config", fit.config, "FitConfig overrides (JSON)");
    fit_cmd->add_option("--iters-coarse", fit.iters_coarse, "Coarse-stage iterations")->capture_default_str();
    fit_cmd->add_option("--iters-detail", fit.iters_detail, "Detail-stage iterations")->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "Seed recorded with the run")->capture_default_str();
    fit_cmd->add_option("--render-size", fit.render_size, "Photometric resolution")->capture_default_str();

    SynthOptions synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic sketch dataset");
    auto* photos = synth_cmd->add_option("--photos", synth.photos, "Directory of photos");
    auto* derived = synth_cmd->add_option("--model-derived", synth.model_derived, "Number of model-derived pairs");
    photos->excludes(derived);
    derived->excludes(photos);
    synth_cmd->add_option("--asset", synth.asset, "Head model asset (model-derived)");
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_option("--size", synth.size, "Render size")->capture_default_str();
    synth_cmd->add_option("--param-scale", synth.param_scale, "Std of shape/expression codes")->capture_default_str();
    synth_cmd->add_option("--first-seed", synth.first_seed, "Seed of the first pair")->capture_default_str();

    std::string pred_dir;
    std::string target_dir;
    CLI::App* eval_cmd = app.add_subcommand("eval", "SSIM and GMSD between two image directories");
    eval_cmd->add_option("--pred", pred_dir, "Predicted images")->required();
    eval_cmd->add_option("--target", target_dir, "Reference images")->required();

    std::string enhance_in;
    std::string enhance_out;
    gctd::GctdConfig gcfg;
    CLI::App* enhance_cmd = app.add_subcommand("enhance", "Contour/texture enhancement of a sketch");
    enhance_cmd->add_option("--in", enhance_in, "Input image")->required();
    enhance_cmd->add_option("--out", enhance_out, "Output image")->required();
    enhance_cmd->add_option("--radius", gcfg.kernel_radius, "Kernel radius")->capture_default_str();
    enhance_cmd->add_option("--sigma-spatial", gcfg.sigma_spatial, "Spatial sigma")->capture_default_str();
    enhance_cmd->add_option("--sigma-range", gcfg.sigma_range_base, "Base range sigma")->capture_default_str();
    enhance_cmd->add_option("--variance-window", gcfg.variance_window, "Local variance window")
        ->capture_default_str();
    enhance_cmd->add_option("--adapt-strength", gcfg.adapt_strength, "Range adaptation strength")
        ->capture_default_str();

    MixOptions mix;
    CLI::App* mix_cmd = app.add_subcommand("mix-demo", "Mix feature statistics of two sketches");
    mix_cmd->add_option("--a", mix.a, "Content sketch")->required();
    mix_cmd->add_option("--b", mix.b, "Style sketch")->required();
    mix_cmd->add_option("--out", mix.out, "Output grid image")->required();
    mix_cmd->add_option("--layer", mix.layer, "Extractor layer 0-3")->capture_default_str();
    auto* lambda_opt = mix_cmd->add_option("--lambda", mix.lambda, "Mixing weight")->capture_default_str();
    auto* sample_opt = mix_cmd->add_flag("--sample", mix.sample, "Draw the weight from Beta(a, a)");
    lambda_opt->excludes(sample_opt);
    mix_cmd->add_option("--beta", mix.beta, "Beta shape a")->capture_default_str();
    mix_cmd->add_option("--seed", mix.seed, "Seed of the extractor and the draw")->capture_default_str();

    ServeOptions serve;
    CLI::App* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--config", serve.config, "Service config (JSON); defaults to $SK13_CONFIG");
    serve_cmd->add_option("--host", serve.host, "Listen address");
    serve_cmd->add_option("--port", serve.port, "Listen port");
    serve_cmd->add_option("--asset", serve.asset, "Head model asset");
    serve_cmd->add_option("--store", serve.store, "Job store directory");
    serve_cmd->add_option("--max-concurrent", serve.max_concurrent, "Concurrent fits");

    std::uint64_t asset_seed = 42;
    int asset_n = 1000;
    std::string asset_out;
    model::BasisDims dims;
    CLI::App* asset_cmd = app.add_subcommand("make-asset", "Generate the procedural head asset");
    asset_cmd->add_option("--seed", asset_seed, "Generator seed")->capture_default_str();
    asset_cmd->add_option("--n", asset_n, "Vertex count")->capture_default_str();
    asset_cmd->add_option("--out", asset_out, "Output asset file")->required();
    asset_cmd->add_option("--shape-dims", dims.shape, "Identity basis size")->capture_default_str();
    asset_cmd->add_option("--expression-dims", dims.expression, "Expression basis size")->capture_default_str();
    asset_cmd->add_option("--albedo-dims", dims.albedo, "Albedo basis size")->capture_default_str();
    asset_cmd->add_option("--detail-dims", dims.detail, "Detail basis size")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return 1;
    }

    try
    {
        if (*fit_cmd)
            return run_fit(fit);
        if (*synth_cmd)
        {
            if (synth.photos.empty() && synth.model_derived <= 0)
            {
                throw ValidationError("--photos/--model-derived", "one of the two sources is required");
            }
            if (synth.photos.empty() && synth.asset.empty())
            {
                throw ValidationError("--asset", "required with --model-derived");
            }
            return run_synth(synth);
        }
        if (*eval_cmd)
            return run_eval(pred_dir, target_dir);
        if (*enhance_cmd)
        {
            write_image(gctd::enhance(read_image(enhance_in), gcfg), enhance_out);
            return 0;
        }
        if (*mix_cmd)
            return run_mix(mix);
        if (*serve_cmd)
            return run_serve(serve);
        if (*asset_cmd)
        {
            model::save_asset(model::generate_desk_asset(asset_seed, asset_n, dims), asset_out);
            return 0;
        }
    }
    catch (const ValidationError& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    catch (const ConfigurationError& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    catch (const nlohmann::json::exception& e)
    {
        std::fprintf(stderr, "error: invalid JSON: %s\n", e.what());
        return 1;
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
