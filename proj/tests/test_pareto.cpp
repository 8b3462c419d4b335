#include "doctest.h"

#include <cmath>

#include "fpc/errors.hpp"
#include "fpc/experiment.hpp"
#include "fpc/pareto.hpp"
#include "support/oracles.hpp"

using namespace fpc;

namespace {

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

ParetoCurve synthetic(std::vector<std::pair<double, double>> tau_f, std::vector<double> lambdas = {}) {
    ParetoCurve c;
    for (std::size_t i = 0; i < tau_f.size(); ++i) {
        ParetoPoint p;
        p.tau = tau_f[i].first;
        p.f_val = tau_f[i].second;
        p.lambda = lambdas.empty() ? 0.0 : lambdas[i];
        c.points.push_back(p);
    }
    return c;
}

}  // namespace

TEST_CASE("1D analytic trade-off curve") {
    const std::vector<double> grid{1.5, 1.0, 0.5};
    // f(u) = ½(u-2)² has L = 1; with α = 1 one step lands on 2 - λ.
    const ParetoCurve c = reference_curve(scalar_problem(1.0), grid, config(1.0, 100, 1e-14), Vector{0.0}, true);
    REQUIRE(c.points.size() == 3);
    CHECK(c.points[0].tau == doctest::Approx(0.5));
    CHECK(c.points[0].f_val == doctest::Approx(1.125));
    CHECK(c.points[1].tau == doctest::Approx(1.0));
    CHECK(c.points[1].f_val == doctest::Approx(0.5));
    CHECK(c.points[2].tau == doctest::Approx(1.5));
    CHECK(c.points[2].f_val == doctest::Approx(0.125));
    CHECK(c.lambda_grid == grid);

    const SlopeReport s = slope_check(c);
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].slope == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s.max_deviation < 1e-14);

    const CurveShapeReport shape = check_curve_shape(c);
    CHECK(shape.monotone);
    CHECK(shape.convex);
}

TEST_CASE("symmetric grid on a quadratic value function gives exact slopes") {
    const std::vector<double> grid{1.75, 1.5, 1.25, 1.0, 0.75, 0.5, 0.25};
    const ParetoCurve c = reference_curve(scalar_problem(1.0), grid, config(1.0, 100, 1e-14), Vector{0.0}, false);
    const SlopeReport s = slope_check(c);
    CHECK(s.entries.size() == 5);
    for (const SlopeEntry& e : s.entries) CHECK(e.slope == doctest::Approx(-e.lambda).epsilon(1e-13));
}

TEST_CASE("grid validation") {
    const CompositeProblem p = scalar_problem(1.0);
    const SolverConfig cfg = config(1.0, 10, 1e-12);
    CHECK_THROWS_AS(reference_curve(p, std::vector<double>{}, cfg, Vector{0.0}, true), ConfigError);
    CHECK_THROWS_AS(reference_curve(p, std::vector<double>{0.5, 1.0}, cfg, Vector{0.0}, true), ConfigError);
    CHECK_THROWS_AS(reference_curve(p, std::vector<double>{1.0, 1.0}, cfg, Vector{0.0}, true), ConfigError);
    CHECK_THROWS_AS(reference_curve(p, std::vector<double>{1.0, -1.0}, cfg, Vector{0.0}, true), ConfigError);
}

TEST_CASE("a diverging grid solve names its lambda") {
    auto f = least_squares_term(std::make_shared<DiagonalOperator>(Vector{2.0}), Vector{1.0}, 0.25);
    const CompositeProblem p{f, l1_term(), 0.1};
    try {
        reference_curve(p, std::vector<double>{0.25, 0.125}, config(1.9 / f->lipschitz(), 1000, 0.0), Vector{0.0},
                        true);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(std::string(e.what()).find("lambda=0.25") != std::string::npos);
    }
}

TEST_CASE("log-spaced grid") {
    const auto g = log_spaced_grid(1e-3, 1e-1, 30);
    CHECK(g.size() == 30);
    CHECK(g.front() == 1e-1);
    CHECK(g.back() == 1e-3);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] < g[i - 1]);
        CHECK(g[i - 1] / g[i] == doctest::Approx(std::pow(100.0, 1.0 / 29.0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(log_spaced_grid(0.0, 1.0, 3), ConfigError);
    CHECK_THROWS_AS(log_spaced_grid(1.0, 0.5, 3), ConfigError);
}

TEST_CASE("shape checks flag violations") {
    CHECK_FALSE(check_curve_shape(synthetic({{0, 3}, {1, 2}, {2, 2.5}})).monotone);
    // Slopes -1 then -2: not convex.
    const CurveShapeReport r = check_curve_shape(synthetic({{0, 4}, {1, 3}, {2, 1}}));
    CHECK(r.monotone);
    CHECK_FALSE(r.convex);
    CHECK(r.worst_slope_drop == doctest::Approx(1.0));
    // Within slack.
    CHECK(check_curve_shape(synthetic({{0, 3}, {1, 3 + 5e-11}, {2, 3}})).monotone);
    // A repeated tau is skipped, not divided by.
    CHECK(check_curve_shape(synthetic({{0, 3}, {0, 3}, {1, 2}})).skipped_segments == 1);
}

TEST_CASE("slope check errors and degenerate segments") {
    CHECK_THROWS_AS(slope_check(synthetic({{0, 1}, {1, 0}})), InputError);
    const SlopeReport r = slope_check(synthetic({{0, 3}, {1, 2}, {1, 2}, {1, 2}, {3, 0.5}}, {3, 2, 2, 2, 0.5}));
    CHECK(r.warnings.size() == 1);
    CHECK(r.entries.size() == 2);
    // Constant f region with λ = 0: slope 0 matches.
    const SlopeReport z = slope_check(synthetic({{0, 1}, {1, 1}, {2, 1}}, {0, 0, 0}));
    CHECK(z.max_deviation == 0.0);
}

TEST_CASE("interpolation clamps outside the sampled range") {
    const ParetoCurve c = synthetic({{1, 4}, {2, 2}, {4, 1}});
    CHECK(c.interpolate(0.0) == 4.0);
    CHECK(c.interpolate(1.5) == 3.0);
    CHECK(c.interpolate(3.0) == 1.5);
    CHECK(c.interpolate(9.0) == 1.0);
    CHECK_THROWS_AS(ParetoCurve{}.interpolate(1.0), InputError);
}

TEST_CASE("path against curve: reference solves sit on the curve") {
    const std::vector<double> grid{1.75, 1.5, 1.25, 1.0, 0.75, 0.5, 0.25};
    const ParetoCurve c = reference_curve(scalar_problem(1.0), grid, config(1.0, 100, 1e-14), Vector{0.0}, true);
    std::vector<TracePoint> trace;
    for (const ParetoPoint& p : c.points) {
        TracePoint tp;
        tp.g_val = p.tau;
        tp.f_val = p.f_val;
        trace.push_back(tp);
    }
    const PathReport r = path_vs_curve(trace, c);
    CHECK(std::abs(r.max_rel_excess) < 1e-14);
    CHECK(r.clipped == 0);
    CHECK(r.warnings.empty());
}

TEST_CASE("path against curve: a constant-lambda run from far away starts high and settles") {
    const oracle::Lasso L = oracle::make_lasso8(21);
    const CompositeProblem p = L.problem();
    const double alpha = 0.5 / p.f->lipschitz();
    // Grid with p.lambda as a node: p.lambda * 2^(k/4), k = 8 .. -16.
    std::vector<double> grid;
    for (int k = 8; k >= -16; --k) grid.push_back(p.lambda * std::pow(2.0, k / 4.0));
    const ParetoCurve c = reference_curve(p, grid, config(alpha, 200000, 1e-13), Vector(L.cols, 0.0), true);

    SolverConfig cfg = config(alpha, 3000, 1e-13);
    const Vector far = oracle::random_vector(L.cols, 5, 3.0);
    const SolveResult r = solve_fixed(p, far, cfg);
    const PathReport rep = path_vs_curve(r.trace, c);
    REQUIRE(rep.in_range > 10);
    double early = 0.0;
    for (std::size_t i = 0; i < 5; ++i) early = std::max(early, rep.entries[i].rel_excess);
    CHECK(early > 0.05);
    CHECK(std::abs(rep.entries.back().rel_excess) < 1e-6);
    // Every computed point lies on or above the value function. The chord of a convex curve
    // overestimates it between nodes, so allow that interpolation error.
    for (const PathEntry& e : rep.entries)
        if (!e.clipped) CHECK(e.rel_excess >= -5e-3);
}

TEST_CASE("path against curve: points outside the tau range are clipped and excluded") {
    const ParetoCurve c = synthetic({{1, 4}, {2, 2}, {4, 1}});
    std::vector<TracePoint> trace(3);
    trace[0].g_val = 0.5;
    trace[0].f_val = 10.0;
    trace[1].g_val = 2.0;
    trace[1].f_val = 2.2;
    trace[2].g_val = 5.0;
    trace[2].f_val = 0.1;
    const PathReport r = path_vs_curve(trace, c);
    CHECK(r.clipped == 2);
    CHECK(r.in_range == 1);
    CHECK(r.entries[0].clipped);
    CHECK(r.max_rel_excess == doctest::Approx(0.1));
    CHECK(r.mean_rel_excess == doctest::Approx(0.1));
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("L-curve corner of a synthetic L") {
    // Steep drop then a flat tail; the bend is at index 3.
    const ParetoCurve c = synthetic({{1, 100}, {2, 20}, {3, 5}, {4, 1.2}, {8, 1.0}, {16, 0.9}, {32, 0.85}});
    CHECK(lcurve_corner(c) == 3);
}

TEST_CASE("cold-start grids are identical for any worker count") {
    ExperimentConfig cfg;
    cfg.image_size = 16;
    cfg.wavelet_levels = 2;
    const DeblurInstance inst = build_deblur_instance(cfg);
    const auto grid = log_spaced_grid(1e-3, 1e-1, 8);
    const SolverConfig sc = config(inst.alpha, 300, 1e-10);
    const ParetoCurve a = reference_curve(inst.problem(grid[0]), grid, sc, inst.u0, false, 1);
    const ParetoCurve b = reference_curve(inst.problem(grid[0]), grid, sc, inst.u0, false, 4);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].lambda == b.points[i].lambda);
        CHECK(a.points[i].tau == b.points[i].tau);
        CHECK(a.points[i].f_val == b.points[i].f_val);
    }
}

TEST_CASE("small deblur curve: shape and slope self-consistency") {
    ExperimentConfig cfg;
    cfg.image_size = 16;
    cfg.wavelet_levels = 2;
    const DeblurInstance inst = build_deblur_instance(cfg);
    const auto grid = log_spaced_grid(3e-3, 1e-1, 12);
    const ParetoCurve c = reference_curve(inst.problem(grid[0]), grid, config(inst.alpha, 50000, 1e-12), inst.u0, true);
    const CurveShapeReport shape = check_curve_shape(c);
    CHECK(shape.monotone);
    CHECK(shape.convex);
    CHECK(slope_check(c).max_deviation <= 0.10);
}
