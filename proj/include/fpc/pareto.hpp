#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fpc/objective.hpp"
#include "fpc/solver.hpp"

namespace fpc {

/// A sample (g(û(λ)), f(û(λ))) of the trade-off curve.
struct ParetoPoint {
    double lambda = 0.0;
    double tau = 0.0;    ///< g(û(λ))
    double f_val = 0.0;  ///< f(û(λ))
    std::size_t solve_iterations = 0;
    double residual_tol = 0.0;  ///< last step norm of the solve
};

struct ParetoCurve {
    std::vector<ParetoPoint> points;  ///< sorted by tau ascending
    std::vector<double> lambda_grid;  ///< as supplied (descending)

    /// Piecewise-linear interpolant in the (τ, f) plane; clamps outside the sampled range.
    double interpolate(double tau) const;
    double tau_min() const { return points.front().tau; }
    double tau_max() const { return points.back().tau; }
};

/// `count` log-spaced values from `hi` down to `lo` (descending).
std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count);

/// One fixed-λ solve per grid value. With `warm_start` each solve starts from
/// the previous minimizer (grid must be descending); otherwise every solve starts
/// from `u0` and, for `workers > 1`, solves run concurrently.
/// Throws ConfigError for an empty, non-positive or unsorted grid and
/// DivergenceError naming the failing λ.
ParetoCurve reference_curve(const CompositeProblem& tmpl, std::span<const double> lambda_grid, const SolverConfig& cfg,
                            std::span<const double> u0, bool warm_start, std::size_t workers = 1);

struct CurveShapeReport {
    bool monotone = true;           ///< f non-increasing in τ
    bool convex = true;             ///< consecutive slopes non-decreasing
    double worst_increase = 0.0;    ///< max(f_{i+1} - f_i)
    double worst_slope_drop = 0.0;  ///< max(s_i - s_{i+1})
    std::size_t skipped_segments = 0;
};

inline constexpr double kMonotoneSlack = 1e-10;
inline constexpr double kConvexSlack = 1e-8;

CurveShapeReport check_curve_shape(const ParetoCurve& curve, double monotone_slack = kMonotoneSlack,
                                   double convex_slack = kConvexSlack);

struct SlopeEntry {
    std::size_t index = 0;
    double lambda = 0.0;
    double tau = 0.0;
    double slope = 0.0;      ///< centred divided difference Δf/Δτ
    double deviation = 0.0;  ///< |slope + λ| / λ (|slope| when λ = 0)
};

struct SlopeReport {
    std::vector<SlopeEntry> entries;
    double max_deviation = 0.0;
    std::vector<std::string> warnings;
};

/// Compares the centred slope at each interior point with -λ.
/// Throws InputError for fewer than three points.
SlopeReport slope_check(const ParetoCurve& curve);

struct PathEntry {
    std::size_t n = 0;
    double g = 0.0;
    double f = 0.0;
    double f_curve = 0.0;
    double excess = 0.0;      ///< f - f_curve
    double rel_excess = 0.0;  ///< excess / f_curve
    bool clipped = false;     ///< g outside the curve's τ range
};

struct PathReport {
    std::vector<PathEntry> entries;
    double max_rel_excess = 0.0;
    double mean_rel_excess = 0.0;
    double min_rel_excess = 0.0;
    std::size_t in_range = 0;
    std::size_t clipped = 0;
    std::vector<std::string> warnings;
};

/// Distance of a path in the g-f plane above the curve interpolant. Points
/// outside the curve's τ range are clipped, flagged and left out of the statistics.
PathReport path_vs_curve(std::span<const TracePoint> trace, const ParetoCurve& curve);

/// L-curve corner: the point farthest from the chord joining the end points
/// in normalized (log τ, log f) coordinates. Returns its index.
std::size_t lcurve_corner(const ParetoCurve& curve);

}  // namespace fpc
