// fpc: command-line front end for the continuation solver and the deblurring study.
//
//   fpc solve        one deblur problem, one schedule
//   fpc pareto       fixed-λ reference grid
//   fpc demo-deblur  full study: curve, four schedules, restored images, summary
//   fpc check        re-run the monitors on a saved trace
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 monitor violation.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpc/errors.hpp"
#include "fpc/experiment.hpp"
#include "fpc/image.hpp"
#include "fpc/pareto.hpp"
#include "fpc/schedules.hpp"
#include "fpc/solver.hpp"
#include "fpc/trace_io.hpp"

namespace {

using nlohmann::json;
using namespace fpc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitMonitor = 4;

// Flags shared by the subcommands that build a deblur instance. Each optional
// overrides the --config file only when given.
struct CommonFlags {
    std::string config_path;
    std::optional<std::size_t> size;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha_frac;
    std::optional<double> lambda;
    std::optional<double> noise;
    std::optional<int> levels;
    std::optional<std::size_t> iters;
    std::optional<double> tol;
    std::optional<std::string> grid;
    std::optional<std::size_t> grid_iters;
    std::optional<std::string> image;
    std::optional<std::string> out;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config_path, "JSON config file; flags override its values");
    app->add_option("--size", f.size, "image side length");
    app->add_option("--seed", f.seed, "phantom and noise seed");
    app->add_option("--alpha-frac", f.alpha_frac, "step as a fraction of 1/L");
    app->add_option("--lambda", f.lambda, "target lambda (default: L-curve corner of the reference grid)");
    app->add_option("--noise", f.noise, "noise standard deviation");
    app->add_option("--levels", f.levels, "wavelet levels");
    app->add_option("--iters", f.iters, "maximum continuation iterations");
    app->add_option("--tol", f.tol, "step-norm stopping tolerance");
    app->add_option("--grid", f.grid, "lambda grid as min:max:count");
    app->add_option("--grid-iters", f.grid_iters, "iteration cap per grid solve");
    app->add_option("--image", f.image, "PGM image replacing the phantom");
    app->add_option("--out", f.out, "output directory");
}

void parse_grid(const std::string& text, ExperimentConfig& cfg) {
    double lo = 0.0;
    double hi = 0.0;
    unsigned long count = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lu%c", &lo, &hi, &count, &tail) != 3)
        throw ConfigError("--grid expects min:max:count, got '" + text + "'");
    cfg.grid_min = lo;
    cfg.grid_max = hi;
    cfg.grid_count = count;
}

ExperimentConfig resolve_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) {
        try {
            cfg = config_from_json(read_json(f.config_path));
        } catch (const InputError& e) {
            throw ConfigError(e.what());
        }
    }
    if (f.size) cfg.image_size = *f.size;
    if (f.seed) cfg.seed = *f.seed;
    if (f.alpha_frac) cfg.alpha_frac = *f.alpha_frac;
    if (f.lambda) cfg.lambda = *f.lambda;
    if (f.noise) cfg.noise_sigma = *f.noise;
    if (f.levels) cfg.wavelet_levels = *f.levels;
    if (f.iters) cfg.iters = *f.iters;
    if (f.tol) cfg.tol = *f.tol;
    if (f.grid) parse_grid(*f.grid, cfg);
    if (f.grid_iters) cfg.grid_iters = *f.grid_iters;
    if (f.image) cfg.image_path = *f.image;
    if (f.out) cfg.out_dir = *f.out;
    cfg.validate();
    return cfg;
}

ParetoCurve grid_curve(const DeblurInstance& inst, const ExperimentConfig& cfg, bool warm_start, std::size_t workers) {
    SolverConfig sc;
    sc.alpha = inst.alpha;
    sc.max_iter = cfg.grid_iters;
    sc.step_tol = cfg.grid_tol;
    const auto grid = log_spaced_grid(cfg.grid_min, cfg.grid_max, cfg.grid_count);
    return reference_curve(inst.problem(grid.front()), grid, sc, inst.u0, warm_start, workers);
}

void print_rate(const RateReport& r) {
    if (!r.applicable) {
        std::cout << "rate bound: not applicable (" << r.note << ")\n";
        return;
    }
    std::cout << "rate bound: " << (r.passed ? "holds" : "VIOLATED") << " at " << r.entries.size()
              << " points, worst margin " << r.worst_margin << '\n';
}

void print_certificate(const CertificateReport& c) {
    std::cout << "certificate: " << c.checked << " points, " << c.violations << " violation(s), worst gap-eps "
              << c.worst_excess << '\n';
}

// --- solve ---------------------------------------------------------------

struct SolveFlags {
    CommonFlags common;
    std::string schedule = "lambda3";
    bool rate_monitor = false;
    bool certificate_monitor = false;
    std::size_t ref_iters = 1000000;
    double ref_tol = 1e-12;
};

int run_solve(const SolveFlags& f) {
    ExperimentConfig cfg = resolve_config(f.common);
    const DeblurInstance inst = build_deblur_instance(cfg);

    double lambda = cfg.lambda;
    if (std::isnan(lambda)) {
        const ParetoCurve curve = grid_curve(inst, cfg, true, 1);
        lambda = curve.points[lcurve_corner(curve)].lambda;
        std::cout << "lambda from L-curve corner: " << lambda << '\n';
    }
    const LambdaSchedule schedule = parse_schedule(f.schedule, lambda);
    const CompositeProblem p = inst.problem(schedule.target());

    SolverConfig sc;
    sc.alpha = inst.alpha;
    sc.max_iter = cfg.iters;
    sc.step_tol = cfg.tol;
    sc.rate_monitor = f.rate_monitor;
    sc.certificate_monitor = f.certificate_monitor;

    Vector reference;
    if (f.rate_monitor) {
        SolverConfig rc = sc;
        rc.rate_monitor = false;
        rc.certificate_monitor = false;
        rc.max_iter = f.ref_iters;
        rc.step_tol = f.ref_tol;
        reference = solve_fixed(p, inst.u0, rc).u_hat;
    }

    const SolveResult r = solve_continuation(p, schedule, inst.u0, sc, reference);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& issue : r.schedule_report.issues) std::cerr << "schedule: " << issue << '\n';

    bool violated = false;
    std::optional<RateContext> rate_ctx;
    if (r.rate_monitor_active) {
        const double lambda_bar = summability(schedule);
        const RateReport rate = rate_bound_check(p, r.trace, inst.u0, reference, sc.alpha, lambda_bar, r.M_running);
        print_rate(rate);
        violated |= rate.applicable && !rate.passed;
        rate_ctx = RateContext{norm2_squared(inst.u0 - reference), composite_value(p, reference), r.M_running};
    }
    if (f.certificate_monitor) {
        const CertificateReport cert = certificate_check(r.trace);
        print_certificate(cert);
        violated |= !cert.passed;
    }

    const std::filesystem::path out = cfg.out_dir;
    std::filesystem::create_directories(out);
    write_trace_csv(out / "trace.csv", r.trace);
    write_json(out / "trace.json", trace_to_json(r, sc, schedule, inst.lipschitz, rate_ctx));
    write_pgm(out / "restored.pgm", inst.restore(r.u_hat));

    const TracePoint& last = r.trace.back();
    std::cout << "schedule " << schedule.describe() << ": " << r.iterations << " iterations, "
              << (r.converged ? "converged" : "iteration cap reached") << ", f=" << last.f_val << " g=" << last.g_val
              << " F=" << last.F_lambda_val << '\n';
    return violated ? kExitMonitor : kExitOk;
}

// --- pareto --------------------------------------------------------------

struct ParetoFlags {
    CommonFlags common;
    std::size_t workers = 1;
    bool cold = false;
};

int run_pareto(const ParetoFlags& f) {
    const ExperimentConfig cfg = resolve_config(f.common);
    const DeblurInstance inst = build_deblur_instance(cfg);
    const ParetoCurve curve = grid_curve(inst, cfg, !f.cold, f.workers);

    const CurveShapeReport shape = check_curve_shape(curve);
    const SlopeReport slope = curve.points.size() >= 3 ? slope_check(curve) : SlopeReport{};
    const std::size_t corner = lcurve_corner(curve);

    const std::filesystem::path out = cfg.out_dir;
    std::filesystem::create_directories(out);
    write_curve_csv(out / "reference_curve.csv", curve);
    json report = {
        {"config", config_to_json(cfg)},
        {"monotone", shape.monotone},
        {"convex", shape.convex},
        {"worst_increase", shape.worst_increase},
        {"worst_slope_drop", shape.worst_slope_drop},
        {"max_slope_deviation", slope.max_deviation},
        {"corner_lambda", curve.points[corner].lambda},
        {"curve", curve_to_json(curve)},
    };
    write_json(out / "curve.json", report);

    std::cout << curve.points.size() << " grid points, monotone=" << shape.monotone << " convex=" << shape.convex
              << ", max slope deviation " << slope.max_deviation << ", corner lambda " << curve.points[corner].lambda
              << '\n';
    return shape.monotone && shape.convex ? kExitOk : kExitMonitor;
}

// --- demo-deblur ---------------------------------------------------------

int run_demo(const CommonFlags& f, bool certificate_monitor) {
    ExperimentConfig cfg = resolve_config(f);
    if (certificate_monitor) cfg.certificate_monitor = true;
    const DemoResult demo = run_demo_deblur(cfg);

    std::cout << "chosen lambda " << demo.chosen_lambda << '\n';
    bool violated = false;
    for (const ScheduleOutcome& oc : demo.outcomes) {
        std::cout << oc.name << ": " << oc.result.iterations << " iterations, f=" << oc.final_f
                  << " g=" << oc.final_g << " F=" << oc.final_F << ", path excess max " << oc.path.max_rel_excess
                  << " mean " << oc.path.mean_rel_excess << '\n';
        if (cfg.certificate_monitor) violated |= !certificate_check(oc.result.trace).passed;
    }
    std::cout << "wrote " << demo.files.size() << " files to " << cfg.out_dir << '\n';
    return violated ? kExitMonitor : kExitOk;
}

// --- check ---------------------------------------------------------------

struct CheckFlags {
    std::string trace;
    std::string curve;
    std::optional<double> max_excess;
};

int run_check(const CheckFlags& f) {
    const LoadedTrace t = load_trace(f.trace);
    if (t.trace.empty()) throw InputError("trace is empty: " + f.trace);
    bool violated = false;
    bool ran = false;

    const CertificateReport cert = certificate_check(t.trace);
    if (cert.checked > 0) {
        print_certificate(cert);
        violated |= !cert.passed;
        ran = true;
    }

    if (t.rate && t.alpha && t.lipschitz && t.lambda_bar) {
        const RateReport rate =
            rate_bound_check(t.trace, t.rate->dist0_sq, t.rate->F_ref, *t.alpha, *t.lipschitz, *t.lambda_bar, t.rate->M);
        print_rate(rate);
        violated |= rate.applicable && !rate.passed;
        ran = true;
    }

    if (!f.curve.empty()) {
        const PathReport path = path_vs_curve(t.trace, load_curve(f.curve));
        for (const auto& w : path.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << "path excess: max " << path.max_rel_excess << " mean " << path.mean_rel_excess << " min "
                  << path.min_rel_excess << " over " << path.in_range << " points\n";
        if (f.max_excess) violated |= path.max_rel_excess > *f.max_excess;
        ran = true;
    }

    if (!ran) std::cout << "nothing to check: trace carries no monitor data\n";
    return violated ? kExitMonitor : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuation proximal-gradient solver and wavelet deblurring study"};
    app.require_subcommand(1);

    SolveFlags solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one deblur problem with one schedule");
    add_common(solve_cmd, solve.common);
    solve_cmd->add_option("--schedule", solve.schedule, "schedule spec, e.g. lambda1 or power:beta=9,theta=1.01");
    solve_cmd->add_flag("--rate-monitor", solve.rate_monitor, "check the averaged-iterate rate bound");
    solve_cmd->add_flag("--certificate-monitor", solve.certificate_monitor, "check the prox-subproblem certificate");
    solve_cmd->add_option("--ref-iters", solve.ref_iters, "iteration cap of the reference solve (rate monitor)");
    solve_cmd->add_option("--ref-tol", solve.ref_tol, "tolerance of the reference solve (rate monitor)");

    ParetoFlags pareto;
    CLI::App* pareto_cmd = app.add_subcommand("pareto", "compute the fixed-lambda reference curve");
    add_common(pareto_cmd, pareto.common);
    pareto_cmd->add_option("--workers", pareto.workers, "concurrent grid solves (cold starts only)");
    pareto_cmd->add_flag("--cold", pareto.cold, "start every grid solve from u0 instead of the previous minimizer");

    CommonFlags demo;
    bool demo_cert = false;
    CLI::App* demo_cmd = app.add_subcommand("demo-deblur", "run the full deblurring study");
    add_common(demo_cmd, demo);
    demo_cmd->add_flag("--certificate-monitor", demo_cert, "record and check the certificate for every schedule");

    CheckFlags check;
    CLI::App* check_cmd = app.add_subcommand("check", "run the monitors on a saved trace (.json or .csv)");
    check_cmd->add_option("trace", check.trace, "trace file")->required();
    check_cmd->add_option("--curve", check.curve, "reference curve (.csv or curve.json) for the path comparison");
    check_cmd->add_option("--max-excess", check.max_excess, "fail when the relative path excess exceeds this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*solve_cmd) return run_solve(solve);
        if (*pareto_cmd) return run_pareto(pareto);
        if (*demo_cmd) return run_demo(demo, demo_cert);
        if (*check_cmd) return run_check(check);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NonConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
