#include "fpc/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>

#include "fpc/errors.hpp"
#include "fpc/trace_io.hpp"

namespace fpc {

using nlohmann::json;

namespace {

// Multiplier applied to the estimated Lipschitz constant before taking α.
constexpr double kLipschitzSafety = 1.01;

// Noise is drawn from a stream offset from the phantom's seed.
constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;

}  // namespace

void ExperimentConfig::validate() const {
    if (image_size < 16) throw ConfigError("image_size must be at least 16");
    if (wavelet_levels < 0) throw ConfigError("wavelet_levels must be non-negative");
    const std::size_t block = std::size_t{1} << wavelet_levels;
    if (image_size % block != 0)
        throw ConfigError("image_size " + std::to_string(image_size) + " is not divisible by 2^" +
                          std::to_string(wavelet_levels));
    if (kernel_size % 2 == 0 || kernel_size > image_size) throw ConfigError("kernel_size must be odd and fit the image");
    if (!(kernel_sigma > 0.0)) throw ConfigError("kernel_sigma must be positive");
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
    if (!(alpha_frac > 0.0) || !(alpha_frac < 2.0)) throw ConfigError("alpha_frac must lie in (0, 2)");
    if (!std::isnan(lambda) && !(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(grid_min > 0.0) || !(grid_max >= grid_min) || grid_count == 0) throw ConfigError("invalid lambda grid");
    if (schedules.empty()) throw ConfigError("no schedules configured");
    std::set<std::string> seen;
    for (const auto& s : schedules)
        if (!seen.insert(s).second) throw ConfigError("duplicate schedule '" + s + "'");
}

json config_to_json(const ExperimentConfig& cfg) {
    return {
        {"image_size", cfg.image_size},
        {"kernel_size", cfg.kernel_size},
        {"kernel_sigma", cfg.kernel_sigma},
        {"noise_sigma", cfg.noise_sigma},
        {"seed", cfg.seed},
        {"wavelet_levels", cfg.wavelet_levels},
        {"alpha_frac", cfg.alpha_frac},
        {"lambda", std::isnan(cfg.lambda) ? json(nullptr) : json(cfg.lambda)},
        {"schedules", cfg.schedules},
        {"grid_min", cfg.grid_min},
        {"grid_max", cfg.grid_max},
        {"grid_count", cfg.grid_count},
        {"grid_iters", cfg.grid_iters},
        {"grid_tol", cfg.grid_tol},
        {"iters", cfg.iters},
        {"tol", cfg.tol},
        {"certificate_monitor", cfg.certificate_monitor},
        {"image_path", cfg.image_path},
        {"out_dir", cfg.out_dir},
    };
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    ExperimentConfig cfg;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "image_size") cfg.image_size = v.get<std::size_t>();
            else if (key == "kernel_size") cfg.kernel_size = v.get<std::size_t>();
            else if (key == "kernel_sigma") cfg.kernel_sigma = v.get<double>();
            else if (key == "noise_sigma") cfg.noise_sigma = v.get<double>();
            else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
            else if (key == "wavelet_levels") cfg.wavelet_levels = v.get<int>();
            else if (key == "alpha_frac") cfg.alpha_frac = v.get<double>();
            else if (key == "lambda") cfg.lambda = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
            else if (key == "schedules") cfg.schedules = v.get<std::vector<std::string>>();
            else if (key == "grid_min") cfg.grid_min = v.get<double>();
            else if (key == "grid_max") cfg.grid_max = v.get<double>();
            else if (key == "grid_count") cfg.grid_count = v.get<std::size_t>();
            else if (key == "grid_iters") cfg.grid_iters = v.get<std::size_t>();
            else if (key == "grid_tol") cfg.grid_tol = v.get<double>();
            else if (key == "iters") cfg.iters = v.get<std::size_t>();
            else if (key == "tol") cfg.tol = v.get<double>();
            else if (key == "certificate_monitor") cfg.certificate_monitor = v.get<bool>();
            else if (key == "image_path") cfg.image_path = v.get<std::string>();
            else if (key == "out_dir") cfg.out_dir = v.get<std::string>();
            else throw ConfigError("config: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

Image make_phantom(std::size_t size, std::uint64_t seed) {
    if (size < 16) throw ConfigError("make_phantom: size must be at least 16");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double n = static_cast<double>(size);

    Image img(size, size, 0.1 + 0.2 * unit(rng));

    constexpr int kRects = 4;
    constexpr int kDiscs = 3;
    for (int k = 0; k < kRects; ++k) {
        const auto h = static_cast<std::size_t>(n * (0.12 + 0.2 * unit(rng)));
        const auto w = static_cast<std::size_t>(n * (0.12 + 0.2 * unit(rng)));
        const auto r0 = static_cast<std::size_t>((n - static_cast<double>(h)) * unit(rng));
        const auto c0 = static_cast<std::size_t>((n - static_cast<double>(w)) * unit(rng));
        const double value = 0.35 + 0.6 * unit(rng);
        for (std::size_t r = r0; r < std::min(size, r0 + h); ++r)
            for (std::size_t c = c0; c < std::min(size, c0 + w); ++c) img.at(r, c) = value;
    }
    for (int k = 0; k < kDiscs; ++k) {
        const double radius = n * (0.06 + 0.1 * unit(rng));
        const double cr = radius + (n - 2.0 * radius) * unit(rng);
        const double cc = radius + (n - 2.0 * radius) * unit(rng);
        const double value = 0.2 + 0.8 * unit(rng);
        for (std::size_t r = 0; r < size; ++r) {
            for (std::size_t c = 0; c < size; ++c) {
                const double dr = static_cast<double>(r) + 0.5 - cr;
                const double dc = static_cast<double>(c) + 0.5 - cc;
                if (dr * dr + dc * dc <= radius * radius) img.at(r, c) = value;
            }
        }
    }
    for (double& v : img.pixels) v = std::clamp(v, 0.0, 1.0);
    return img;
}

Image degrade(const Image& x, const ConvKernel& kernel, double noise_sigma, std::uint64_t seed) {
    Image out = conv2d_periodic(x, kernel);
    if (noise_sigma == 0.0) return out;
    std::mt19937_64 rng(seed ^ kNoiseStream);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : out.pixels) v += noise_sigma * normal(rng);
    return out;
}

ConvKernel experiment_kernel(const ExperimentConfig& cfg) {
    return ConvKernel::gaussian(cfg.kernel_size, cfg.kernel_sigma);
}

Image DeblurInstance::restore(std::span<const double> u) const {
    return Image(truth.height, truth.width, wavelet->adjoint(u));
}

DeblurInstance build_deblur_instance(const ExperimentConfig& cfg) {
    cfg.validate();
    DeblurInstance inst;
    if (cfg.image_path.empty()) {
        inst.truth = make_phantom(cfg.image_size, cfg.seed);
    } else {
        inst.truth = read_pgm(cfg.image_path);
        if (inst.truth.height != cfg.image_size || inst.truth.width != cfg.image_size)
            throw ConfigError("input image must be " + std::to_string(cfg.image_size) + "x" +
                              std::to_string(cfg.image_size));
    }
    const ConvKernel kernel = experiment_kernel(cfg);
    inst.degraded = degrade(inst.truth, kernel, cfg.noise_sigma, cfg.seed);

    const std::size_t n = cfg.image_size;
    inst.blur = std::make_shared<PeriodicConvolution>(n, n, kernel);
    inst.wavelet = std::make_shared<WaveletTransform>(n, n, cfg.wavelet_levels);
    inst.forward = compose(inst.blur, adjoint_of(inst.wavelet));
    // ||A W*|| = ||A|| since W is orthogonal; the blur alone is cheaper to iterate on.
    inst.blur_norm_sq = operator_norm_sq(*inst.blur).value;
    inst.misfit = least_squares_term(inst.forward, inst.degraded.pixels, inst.blur_norm_sq);
    inst.lipschitz = inst.misfit->lipschitz();
    inst.alpha = cfg.alpha_frac / (kLipschitzSafety * inst.lipschitz);
    inst.u0 = inst.wavelet->apply(inst.degraded.pixels);
    return inst;
}

LambdaSchedule experiment_schedule(const std::string& name, double lambda) {
    return parse_schedule(name, lambda);
}

namespace {

std::string file_stem(const std::string& schedule_name) {
    std::string s;
    for (char c : schedule_name) s.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return s;
}

json kernel_taps(const ConvKernel& k) {
    json rows = json::array();
    for (std::size_t r = 0; r < k.size; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < k.size; ++c) row.push_back(k.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

DemoResult run_demo_deblur(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::filesystem::path out_dir = cfg.out_dir;
    std::filesystem::create_directories(out_dir);

    DemoResult demo;
    auto track = [&](const std::string& name) {
        demo.files.push_back(out_dir / name);
        return demo.files.back();
    };

    try {
        const DeblurInstance inst = build_deblur_instance(cfg);

        SolverConfig grid_cfg;
        grid_cfg.alpha = inst.alpha;
        grid_cfg.max_iter = cfg.grid_iters;
        grid_cfg.step_tol = cfg.grid_tol;
        const auto grid = log_spaced_grid(cfg.grid_min, cfg.grid_max, cfg.grid_count);
        demo.curve = reference_curve(inst.problem(grid.front()), grid, grid_cfg, inst.u0, /*warm_start=*/true);
        write_curve_csv(track("reference_curve.csv"), demo.curve);

        const bool auto_lambda = std::isnan(cfg.lambda);
        demo.chosen_lambda = auto_lambda ? demo.curve.points[lcurve_corner(demo.curve)].lambda : cfg.lambda;

        write_pgm(track("truth.pgm"), inst.truth);
        write_pgm(track("degraded.pgm"), inst.degraded);

        json schedules = json::array();
        for (const std::string& name : cfg.schedules) {
            ScheduleOutcome oc{name, experiment_schedule(name, demo.chosen_lambda), {}, {}, 0.0, 0.0, 0.0, 0.0};
            const CompositeProblem p = inst.problem(oc.schedule.target());
            SolverConfig scfg;
            scfg.alpha = inst.alpha;
            scfg.max_iter = cfg.iters;
            scfg.step_tol = cfg.tol;
            scfg.certificate_monitor = cfg.certificate_monitor;
            try {
                oc.result = solve_continuation(p, oc.schedule, inst.u0, scfg);
            } catch (const DivergenceError& e) {
                throw DivergenceError("schedule '" + name + "': " + e.what(), e.iteration());
            } catch (const NumericalError& e) {
                throw NumericalError("schedule '" + name + "': " + e.what(), e.index());
            }
            oc.path = path_vs_curve(oc.result.trace, demo.curve);
            oc.lambda_bar = summability(oc.schedule);
            oc.final_f = p.f->value(oc.result.u_hat);
            oc.final_g = p.g->value(oc.result.u_hat);
            oc.final_F = oc.final_f + p.lambda * oc.final_g;

            const std::string stem = file_stem(name);
            write_trace_csv(track("trace_" + stem + ".csv"), oc.result.trace);
            write_pgm(track("restored_" + stem + ".pgm"), inst.restore(oc.result.u_hat));

            const CertificateReport cert = certificate_check(oc.result.trace);
            json s = {
                {"name", name},
                {"spec", oc.schedule.describe()},
                {"lambda", oc.schedule.target()},
                {"lambda_bar", std::isfinite(oc.lambda_bar) ? json(oc.lambda_bar) : json(nullptr)},
                {"valid", oc.result.schedule_report.valid()},
                {"iterations", oc.result.iterations},
                {"converged", oc.result.converged},
                {"final_f", oc.final_f},
                {"final_g", oc.final_g},
                {"final_F", oc.final_F},
                {"path_excess",
                 {{"max_rel", oc.path.max_rel_excess},
                  {"mean_rel", oc.path.mean_rel_excess},
                  {"min_rel", oc.path.min_rel_excess},
                  {"in_range", oc.path.in_range},
                  {"clipped", oc.path.clipped}}},
                {"warnings", oc.result.warnings},
            };
            if (cfg.certificate_monitor)
                s["certificate"] = {{"checked", cert.checked}, {"violations", cert.violations},
                                    {"worst_excess", cert.worst_excess}};
            schedules.push_back(std::move(s));
            demo.outcomes.push_back(std::move(oc));
        }

        const CompositeProblem chosen = inst.problem(demo.chosen_lambda);
        demo.summary = {
            {"config", config_to_json(cfg)},
            {"metadata",
             {{"image", cfg.image_path.empty() ? "seeded synthetic phantom" : cfg.image_path},
              {"kernel", "normalized Gaussian"},
              {"kernel_taps", kernel_taps(experiment_kernel(cfg))},
              {"noise", "additive noise_sigma * N(0,1), mt19937_64"},
              {"boundary", "periodic"},
              {"wavelet", "Daubechies-3, orthogonal, periodic"},
              {"lambda_selection", auto_lambda ? "l-curve corner of reference curve" : "user supplied"},
              {"lipschitz_safety", kLipschitzSafety}}},
            {"operator", {{"blur_norm_sq", inst.blur_norm_sq}, {"lipschitz", inst.lipschitz}, {"alpha", inst.alpha}}},
            {"chosen_lambda", demo.chosen_lambda},
            {"initial", {{"f", chosen.f->value(inst.u0)}, {"g", chosen.g->value(inst.u0)}}},
            {"reference_curve", curve_to_json(demo.curve)},
            {"schedules", std::move(schedules)},
        };
        write_json(track("summary.json"), demo.summary);
    } catch (...) {
        std::error_code ec;
        for (const auto& f : demo.files) std::filesystem::remove(f, ec);
        throw;
    }
    return demo;
}

}  // namespace fpc
