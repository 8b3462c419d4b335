// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fpc/experiment.hpp"
#include "fpc/pareto.hpp"
#include "fpc/solver.hpp"
#include "support/oracles.hpp"

using namespace fpc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void info(const std::string& line) {
    std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

CompositeProblem scalar_problem(double lambda) {
    return {std::make_shared<ScaledQuadraticTerm>(1.0, Vector{2.0}), l1_term(), lambda};
}

SolverConfig config(double alpha, std::size_t iters, double tol) {
    SolverConfig c;
    c.alpha = alpha;
    c.max_iter = iters;
    c.step_tol = tol;
    return c;
}

constexpr std::uint64_t kLassoSeed = 6;

// 1: convergence of λ¹..λ³ for three step sizes within 10^4 iterations.
void criterion1() {
    const auto t0 = Clock::now();
    const double tol = 1e-7;
    const std::size_t budget = 10000;
    const std::vector<double> fracs{0.5, 1.0, 1.9};
    const char* names[] = {"lambda1", "lambda2", "lambda3"};

    struct Case {
        std::string label;
        CompositeProblem p;
        Vector u0;
        Vector ref;
    };
    std::vector<Case> cases;
    cases.push_back({"1d", scalar_problem(0.5), Vector{0.0}, Vector{1.5}});
    const oracle::Lasso L = oracle::make_lasso8(kLassoSeed);
    const CompositeProblem p8 = L.problem();
    const Vector z8(L.cols, 0.0);
    const Vector ref8 = solve_fixed(p8, z8, config(1.0 / p8.f->lipschitz(), 1000000, 1e-12)).u_hat;
    cases.push_back({"lasso8", p8, z8, ref8});

    std::size_t passed = 0;
    for (const Case& c : cases) {
        const double lip = c.p.f->lipschitz();
        for (std::size_t k = 0; k < 3; ++k) {
            const LambdaSchedule s = experiment_schedule(names[k], c.p.lambda);
            for (double frac : fracs) {
                const SolveResult r = solve_continuation(c.p, s, c.u0, config(frac / lip, budget, 1e-15));
                const double d = oracle::dist(r.u_hat, c.ref);
                const bool good = d <= tol && r.iterations <= budget;
                passed += good;
                char buf[160];
                std::snprintf(buf, sizeof buf, "%-6s %s alpha=%.1f/L  N=%zu  |u_N-u*|=%.3e %s", c.label.c_str(),
                              names[k], frac, r.iterations, d, good ? "" : "<-- above 1e-7");
                info(buf);
            }
        }
    }
    const double t = seconds_since(t0);
    report(1, passed == 18 && t < 5.0,
           std::to_string(passed) + " of 18 runs within 1e-7 in 1e4 iterations" + fmt(", runtime %.2f s (< 5 s)", t));
}

// 2: ergodic rate bound at α = 0.9/L on the 8-dim and 32x32 deblur instances.
void criterion2() {
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t checked = 0;

    auto run = [&](const std::string& label, const CompositeProblem& p, const Vector& u0, const Vector& ref,
                   std::size_t iters) {
        const double alpha = 0.9 / p.f->lipschitz();
        SolverConfig cfg = config(alpha, iters, -1.0);
        cfg.rate_monitor = true;
        const std::vector<std::pair<std::string, LambdaSchedule>> scheds = {
            {"constant", LambdaSchedule::constant(p.lambda)},
            {"lambda1", lambda1(p.lambda)},
            {"lambda2", lambda2(p.lambda)},
            {"lambda3", lambda3(p.lambda)},
            {"lambda4-shape", lambda4().retargeted(p.lambda)}};
        for (const auto& [name, s] : scheds) {
            const SolveResult r = solve_continuation(p, s, u0, cfg, ref);
            const RateReport rep = rate_bound_check(p, r.trace, u0, ref, alpha, summability(s), r.M_running);
            const bool good = rep.applicable && rep.passed;
            ok = ok && good;
            worst = std::min(worst, rep.worst_margin);
            checked += rep.entries.size();
            char buf[200];
            std::snprintf(buf, sizeof buf, "%-8s %-14s points=%zu M=%.4g lambda_bar=%.4g worst margin=%.3e %s",
                          label.c_str(), name.c_str(), rep.entries.size(), r.M_running, summability(s),
                          rep.worst_margin, good ? "" : "<-- violated");
            info(buf);
        }
    };

    const oracle::Lasso L = oracle::make_lasso8(kLassoSeed);
    const CompositeProblem p8 = L.problem();
    const Vector z8(L.cols, 0.0);
    const Vector ref8 = solve_fixed(p8, z8, config(1.0 / p8.f->lipschitz(), 1000000, 1e-12)).u_hat;
    run("lasso8", p8, z8, ref8, 10000);

    ExperimentConfig ec;
    ec.image_size = 32;
    const DeblurInstance inst = build_deblur_instance(ec);
    const CompositeProblem pd = inst.problem(0.01);
    SolverConfig rc = config(inst.alpha, 200000, 1e-13);
    const Vector refd = solve_fixed(pd, inst.u0, rc).u_hat;
    run("deblur32", pd, inst.u0, refd, 3000);

    report(2, ok, fmt("rate bound holds at all %.0f recorded points, worst margin ", static_cast<double>(checked)) +
                      fmt("%.3e (slack 1e-9)", worst));
}

// 3: certificate along monitored λ³ runs.
void criterion3() {
    bool ok = true;
    std::size_t checked = 0;
    double worst = -std::numeric_limits<double>::infinity();

    auto run = [&](const std::string& label, const CompositeProblem& p, const Vector& u0, double alpha,
                   std::size_t iters) {
        SolverConfig cfg = config(alpha, iters, -1.0);
        cfg.certificate_monitor = true;
        cfg.record_every = 1;
        const SolveResult r = solve_continuation(p, lambda3(p.lambda), u0, cfg);
        const CertificateReport rep = certificate_check(r.trace);
        const bool good = rep.passed && rep.checked == iters;
        ok = ok && good;
        checked += rep.checked;
        worst = std::max(worst, rep.worst_excess);
        char buf[200];
        std::snprintf(buf, sizeof buf, "%-8s alpha=%.3g iterations=%zu M=%.4g worst gap-eps=%.3e violations=%zu",
                      label.c_str(), alpha, rep.checked, r.M_certificate, rep.worst_excess, rep.violations);
        info(buf);
    };

    const oracle::Lasso L = oracle::make_lasso8(kLassoSeed);
    const CompositeProblem p8 = L.problem();
    for (double frac : {0.5, 1.0, 1.9}) run("lasso8", p8, Vector(L.cols, 0.0), frac / p8.f->lipschitz(), 2000);

    ExperimentConfig ec;
    ec.image_size = 32;
    const DeblurInstance inst = build_deblur_instance(ec);
    run("deblur32", inst.problem(0.01), inst.u0, inst.alpha, 1000);

    report(3, ok, fmt("gap <= eps + 1e-12 at all %.0f iterations, ", static_cast<double>(checked)) +
                      fmt("worst gap-eps %.3e", worst));
}

// 4: shape of the 30-point curve on 32x32, exact slopes on the 1D problem.
void criterion4() {
    ExperimentConfig ec;
    ec.image_size = 32;
    const DeblurInstance inst = build_deblur_instance(ec);
    const auto grid = log_spaced_grid(1e-3, 1e-1, 30);
    const ParetoCurve c = reference_curve(inst.problem(grid[0]), grid, config(inst.alpha, 20000, 1e-10), inst.u0, true);
    const CurveShapeReport shape = check_curve_shape(c);
    info(fmt("deblur32 curve: worst increase %.3e", shape.worst_increase) +
         fmt(", worst slope drop %.3e", shape.worst_slope_drop));

    const std::vector<double> g1{1.75, 1.5, 1.25, 1.0, 0.75, 0.5, 0.25};
    const ParetoCurve c1 = reference_curve(scalar_problem(1.0), g1, config(1.0, 100, 1e-14), Vector{0.0}, true);
    const SlopeReport s1 = slope_check(c1);
    info(fmt("1d curve: max |slope + lambda| / lambda = %.3e over ", s1.max_deviation) +
         std::to_string(s1.entries.size()) + " interior points");
    // "Exactly" up to floating-point rounding of the divided differences.
    const bool ok = c.points.size() == 30 && shape.monotone && shape.convex && s1.entries.size() == 5 &&
                    s1.max_deviation <= 1e-12;
    report(4, ok, std::string("30-point curve ") + (shape.monotone ? "monotone" : "NOT monotone") + ", " +
                      (shape.convex ? "convex" : "NOT convex") + fmt("; 1D slope deviation %.1e", s1.max_deviation));
}

// 5: 64x64 reproduction.
void criterion5() {
    const auto t0 = Clock::now();
    ExperimentConfig ec;
    ec.image_size = 64;
    const DeblurInstance inst = build_deblur_instance(ec);
    const auto grid = log_spaced_grid(ec.grid_min, ec.grid_max, ec.grid_count);
    const ParetoCurve curve =
        reference_curve(inst.problem(grid[0]), grid, config(inst.alpha, 20000, 1e-9), inst.u0, true);
    const double lam = curve.points[lcurve_corner(curve)].lambda;
    info(fmt("reference curve %.1f s", seconds_since(t0)) + fmt(", corner lambda %.6g", lam));

    std::vector<std::pair<double, double>> ends;
    for (const char* name : {"lambda1", "lambda2", "lambda3"}) {
        const auto t1 = Clock::now();
        const LambdaSchedule s = experiment_schedule(name, lam);
        const SolveResult r = solve_continuation(inst.problem(lam), s, inst.u0, config(inst.alpha, 100000, 1e-9));
        ends.emplace_back(r.trace.back().g_val, r.trace.back().f_val);
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s N=%zu converged=%d g=%.8f f=%.8f (%.1f s)", name, r.iterations,
                      r.converged, ends.back().first, ends.back().second, seconds_since(t1));
        info(buf);
    }
    double spread = 0.0;
    for (std::size_t i = 0; i < ends.size(); ++i)
        for (std::size_t j = i + 1; j < ends.size(); ++j) {
            const double d = std::hypot(ends[i].first - ends[j].first, ends[i].second - ends[j].second);
            const double s = std::max(std::hypot(ends[i].first, ends[i].second), std::hypot(ends[j].first, ends[j].second));
            spread = std::max(spread, d / s);
        }
    const bool ends_ok = spread <= 1e-4;

    const auto t4 = Clock::now();
    const LambdaSchedule s4 = lambda4();
    const SolveResult r4 = solve_continuation(inst.problem(s4.target()), s4, inst.u0, config(inst.alpha, 100000, 1e-9));
    const PathReport path = path_vs_curve(r4.trace, curve);
    double late = -std::numeric_limits<double>::infinity();
    std::size_t worst_n = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const PathEntry& e : path.entries) {
        if (e.clipped) continue;
        if (e.rel_excess > worst) {
            worst = e.rel_excess;
            worst_n = e.n;
        }
        if (e.n >= 3) late = std::max(late, e.rel_excess);
    }
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "lambda4 N=%zu (%.1f s): in range %zu, clipped %zu, max rel excess %.4f at n=%zu, "
                  "mean %.4f, max over n>=3 %.4f",
                  r4.iterations, seconds_since(t4), path.in_range, path.clipped, path.max_rel_excess, worst_n,
                  path.mean_rel_excess, late);
    info(buf);
    const bool path_ok = path.in_range > 0 && path.max_rel_excess < 0.05;

    const double t = seconds_since(t0);
    const bool ok = ends_ok && path_ok && t < 300.0;
    report(5, ok, fmt("endpoint spread %.2e (<= 1e-4), ", spread) +
                      fmt("lambda4 max rel excess %.4f (< 0.05), ", path.max_rel_excess) + fmt("runtime %.0f s (< 300 s)", t));
}

// 6: operator suite.
void criterion6() {
    const std::size_t n = 32;
    auto conv = std::make_shared<PeriodicConvolution>(n, n, ConvKernel::gaussian(5, 1.0));
    auto wav = std::make_shared<WaveletTransform>(n, n, 3);
    auto comp = compose(conv, adjoint_of(wav));
    const double a_conv = oracle::worst_adjoint_mismatch(*conv, 100, 1000);
    const double a_wav = oracle::worst_adjoint_mismatch(*wav, 100, 2000);
    const double a_comp = oracle::worst_adjoint_mismatch(*comp, 100, 3000);

    double round = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Vector v = oracle::random_vector(n * n, 4000 + k);
        round = std::max(round, oracle::dist(dwt_inverse(dwt_forward(v, n, n, 3), n, n, 3), v) / oracle::norm(v));
    }

    double power = 0.0;
    const std::vector<ConvKernel> kernels = {ConvKernel::gaussian(5, 1.0), ConvKernel::box(5),
                                             ConvKernel(3, oracle::random_vector(9, 11)),
                                             ConvKernel(5, oracle::random_vector(25, 12))};
    for (const ConvKernel& k : kernels) {
        const double expected = oracle::circulant_norm_sq(k, 16, 16);
        power = std::max(power, std::abs(operator_norm_sq(PeriodicConvolution(16, 16, k)).value - expected) / expected);
    }

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> av(-3.0, 3.0);
    std::uniform_real_distribution<double> tv(0.01, 2.0);
    double prox = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double a = av(rng);
        const double t = tv(rng);
        prox = std::max(prox, std::abs(soft_threshold(a, t) - oracle::brute_prox_1d(a, t)));
    }

    char buf[240];
    std::snprintf(buf, sizeof buf, "adjoint conv %.1e wavelet %.1e composition %.1e; roundtrip %.1e; power %.1e; prox %.1e",
                  a_conv, a_wav, a_comp, round, power, prox);
    const bool ok = a_conv <= 1e-10 && a_wav <= 1e-10 && a_comp <= 1e-10 && round <= 1e-10 && power <= 1e-6 &&
                    prox <= 1e-5;
    report(6, ok, buf);
}

// 7: constant schedule equals plain ISTA.
void criterion7() {
    const oracle::Lasso L = oracle::make_lasso8(9);
    const CompositeProblem p = L.problem();
    const double alpha = 1.0 / p.f->lipschitz();
    const Vector u0 = oracle::random_vector(L.cols, 99);
    const auto expected = oracle::plain_ista(L, u0, alpha, 1000);
    double worst = 0.0;
    std::size_t seen = 0;
    solve_fixed(p, u0, config(alpha, 1000, -1.0), [&](std::size_t k, std::span<const double> u) {
        ++seen;
        for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(u[i] - expected[k][i]));
    });
    report(7, seen == 1000 && worst <= 1e-14, fmt("max iterate difference %.1e over 1000 iterations (<= 1e-14)", worst));
}

template <class F>
void guarded(int id, F f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    guarded(1, criterion1);
    guarded(2, criterion2);
    guarded(3, criterion3);
    guarded(4, criterion4);
    guarded(5, criterion5);
    guarded(6, criterion6);
    guarded(7, criterion7);
    std::printf("%d of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
