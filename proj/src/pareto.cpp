#include "fpc/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "fpc/errors.hpp"

namespace fpc {

double ParetoCurve::interpolate(double tau) const {
    if (points.empty()) throw InputError("ParetoCurve::interpolate: empty curve");
    if (tau <= points.front().tau) return points.front().f_val;
    if (tau >= points.back().tau) return points.back().f_val;
    const auto it = std::upper_bound(points.begin(), points.end(), tau,
                                     [](double t, const ParetoPoint& p) { return t < p.tau; });
    const ParetoPoint& hi = *it;
    const ParetoPoint& lo = *(it - 1);
    const double span = hi.tau - lo.tau;
    if (span <= 0.0) return std::min(lo.f_val, hi.f_val);
    const double w = (tau - lo.tau) / span;
    return (1.0 - w) * lo.f_val + w * hi.f_val;
}

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("log_spaced_grid: need 0 < lo <= hi");
    if (count == 0) throw ConfigError("log_spaced_grid: count must be positive");
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = hi;
        return grid;
    }
    const double a = std::log(hi);
    const double b = std::log(lo);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = std::exp(a + t * (b - a));
    }
    grid.front() = hi;
    grid.back() = lo;
    return grid;
}

namespace {

std::string lambda_label(double lam) {
    std::ostringstream os;
    os.precision(6);
    os << lam;
    return os.str();
}

ParetoPoint solve_point(const CompositeProblem& tmpl, double lam, const SolverConfig& cfg, std::span<const double> start,
                        Vector* minimizer) {
    const CompositeProblem p = tmpl.with_lambda(lam);
    SolveResult r;
    try {
        r = solve_fixed(p, start, cfg);
    } catch (const DivergenceError& e) {
        throw DivergenceError("reference curve solve at lambda=" + lambda_label(lam) + " failed: " + e.what(),
                              e.iteration());
    } catch (const NumericalError& e) {
        throw NumericalError("reference curve solve at lambda=" + lambda_label(lam) + " failed: " + e.what(), e.index());
    }
    ParetoPoint pt;
    pt.lambda = lam;
    pt.f_val = p.f->value(r.u_hat);
    pt.tau = p.g->value(r.u_hat);
    pt.solve_iterations = r.iterations;
    pt.residual_tol = r.trace.empty() ? 0.0 : r.trace.back().step_norm;
    if (minimizer) *minimizer = std::move(r.u_hat);
    return pt;
}

}  // namespace

ParetoCurve reference_curve(const CompositeProblem& tmpl, std::span<const double> lambda_grid, const SolverConfig& cfg,
                            std::span<const double> u0, bool warm_start, std::size_t workers) {
    if (lambda_grid.empty()) throw ConfigError("reference_curve: empty lambda grid");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0)) throw ConfigError("reference_curve: grid values must be positive");
        if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1]))
            throw ConfigError("reference_curve: grid must be strictly descending");
    }

    ParetoCurve curve;
    curve.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
    curve.points.resize(lambda_grid.size());

    if (warm_start) {
        Vector start(u0.begin(), u0.end());
        Vector next;
        for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
            curve.points[i] = solve_point(tmpl, lambda_grid[i], cfg, start, &next);
            start.swap(next);
        }
    } else if (workers <= 1) {
        for (std::size_t i = 0; i < lambda_grid.size(); ++i)
            curve.points[i] = solve_point(tmpl, lambda_grid[i], cfg, u0, nullptr);
    } else {
        // Each worker owns a strided slice of the grid; results land at fixed indices.
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < lambda_grid.size(); i += workers)
                    curve.points[i] = solve_point(tmpl, lambda_grid[i], cfg, u0, nullptr);
            }));
        }
        for (auto& j : jobs) j.get();
    }

    std::stable_sort(curve.points.begin(), curve.points.end(),
                     [](const ParetoPoint& a, const ParetoPoint& b) { return a.tau < b.tau; });
    return curve;
}

CurveShapeReport check_curve_shape(const ParetoCurve& curve, double monotone_slack, double convex_slack) {
    CurveShapeReport r;
    const auto& pts = curve.points;
    std::vector<double> slopes;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double df = pts[i + 1].f_val - pts[i].f_val;
        r.worst_increase = std::max(r.worst_increase, df);
        if (df > monotone_slack) r.monotone = false;
        const double dt = pts[i + 1].tau - pts[i].tau;
        if (dt <= 0.0) {
            ++r.skipped_segments;
            continue;
        }
        slopes.push_back(df / dt);
    }
    for (std::size_t i = 0; i + 1 < slopes.size(); ++i) {
        const double drop = slopes[i] - slopes[i + 1];
        r.worst_slope_drop = std::max(r.worst_slope_drop, drop);
        if (drop > convex_slack) r.convex = false;
    }
    return r;
}

SlopeReport slope_check(const ParetoCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 3) throw InputError("slope_check: need at least three points");
    SlopeReport r;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const double dt = pts[i + 1].tau - pts[i - 1].tau;
        if (!(dt > 0.0)) {
            r.warnings.push_back("degenerate segment around point " + std::to_string(i) + " (duplicate tau); skipped");
            continue;
        }
        SlopeEntry e;
        e.index = i;
        e.lambda = pts[i].lambda;
        e.tau = pts[i].tau;
        e.slope = (pts[i + 1].f_val - pts[i - 1].f_val) / dt;
        e.deviation = e.lambda > 0.0 ? std::abs(e.slope + e.lambda) / e.lambda : std::abs(e.slope);
        r.max_deviation = std::max(r.max_deviation, e.deviation);
        r.entries.push_back(e);
    }
    return r;
}

PathReport path_vs_curve(std::span<const TracePoint> trace, const ParetoCurve& curve) {
    if (curve.points.empty()) throw InputError("path_vs_curve: empty curve");
    PathReport r;
    double sum = 0.0;
    r.max_rel_excess = -std::numeric_limits<double>::infinity();
    r.min_rel_excess = std::numeric_limits<double>::infinity();
    for (const TracePoint& tp : trace) {
        PathEntry e;
        e.n = tp.n;
        e.g = tp.g_val;
        e.f = tp.f_val;
        e.clipped = tp.g_val < curve.tau_min() || tp.g_val > curve.tau_max();
        e.f_curve = curve.interpolate(tp.g_val);
        e.excess = e.f - e.f_curve;
        e.rel_excess = e.f_curve > 0.0 ? e.excess / e.f_curve : e.excess;
        if (e.clipped) {
            ++r.clipped;
        } else {
            ++r.in_range;
            sum += e.rel_excess;
            r.max_rel_excess = std::max(r.max_rel_excess, e.rel_excess);
            r.min_rel_excess = std::min(r.min_rel_excess, e.rel_excess);
        }
        r.entries.push_back(e);
    }
    if (r.clipped > 0)
        r.warnings.push_back(std::to_string(r.clipped) + " trace point(s) outside the curve's tau range were clipped");
    if (r.in_range > 0) {
        r.mean_rel_excess = sum / static_cast<double>(r.in_range);
    } else {
        r.max_rel_excess = r.min_rel_excess = 0.0;
        r.warnings.push_back("no trace point inside the curve's tau range");
    }
    return r;
}

std::size_t lcurve_corner(const ParetoCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 3) return pts.empty() ? 0 : pts.size() / 2;
    std::vector<double> x(pts.size());
    std::vector<double> y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        x[i] = std::log(std::max(pts[i].tau, std::numeric_limits<double>::min()));
        y[i] = std::log(std::max(pts[i].f_val, std::numeric_limits<double>::min()));
    }
    auto normalize = [](std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double a = *lo;
        const double span = *hi - *lo;
        for (double& t : v) t = span > 0.0 ? (t - a) / span : 0.0;
    };
    normalize(x);
    normalize(y);
    const double dx = x.back() - x.front();
    const double dy = y.back() - y.front();
    const double len = std::hypot(dx, dy);
    std::size_t best = pts.size() / 2;
    double best_dist = -1.0;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        // Signed distance below the chord; the corner of an L-curve sits below it.
        const double cross = dx * (y[i] - y.front()) - dy * (x[i] - x.front());
        const double dist = len > 0.0 ? -cross / len : 0.0;
        if (dist > best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return best;
}

}  // namespace fpc
