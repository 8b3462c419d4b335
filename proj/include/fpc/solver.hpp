#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpc/objective.hpp"
#include "fpc/schedules.hpp"
#include "fpc/vector.hpp"

namespace fpc {

struct SolverConfig {
    double alpha = 0.0;             ///< step size, must lie in (0, 2/L)
    std::size_t max_iter = 5000;
    double step_tol = 1e-10;        ///< stop when ||u_{n+1} - u_n|| <= step_tol ...
    double lambda_rtol = 1e-3;      ///< ... and |λ_n - λ| <= lambda_rtol * λ
    std::size_t record_every = 0;   ///< 0: every iteration below 10^4, every 10th above
    bool rate_monitor = false;      ///< track F_λ at the running average of iterates
    bool certificate_monitor = false;
    double divergence_factor = 1e6;
};

/// State after iteration n, i.e. of u_{n+1} = prox_{αλ_n g}(u_n - α∇f(u_n)).
struct TracePoint {
    std::size_t n = 0;
    double lambda_n = 0.0;
    double f_val = 0.0;           ///< f(u_{n+1})
    double g_val = 0.0;           ///< g(u_{n+1})
    double F_lambda_val = 0.0;    ///< f + λ g at the target λ
    double step_norm = 0.0;       ///< ||u_{n+1} - u_n||
    std::optional<double> eps_n;  ///< certificate radius α M |λ - λ_n|
    std::optional<double> gap_n;  ///< measured prox-subproblem suboptimality
    std::optional<double> F_avg;  ///< F_λ((u_1 + ... + u_{n+1}) / (n+1))
};

struct SolveResult {
    Vector u_hat;
    std::vector<TracePoint> trace;
    bool converged = false;
    std::size_t iterations = 0;
    /// sup_i |g(u_i) - g(û_ref)| over u_0..u_N, or against g(u_final) without a reference.
    double M_running = 0.0;
    /// sup_n |g(u_λ^(n)) - g(u_{n+1})|, 0 when the certificate monitor is off.
    double M_certificate = 0.0;
    double f0 = 0.0;
    double g0 = 0.0;
    double step_sq_sum = 0.0;  ///< Σ ||u_{n+1} - u_n||²
    ScheduleReport schedule_report;
    std::vector<std::string> warnings;
    bool rate_monitor_active = false;
};

/// Called after every iteration with (n, u_{n+1}).
using IterateObserver = std::function<void(std::size_t, std::span<const double>)>;

/// prox_{α λ_n g}(u - α ∇f(u)). Throws NumericalError on a non-finite gradient.
Vector prox_grad_step(const CompositeProblem& p, std::span<const double> u, double alpha, double lambda_n);

/// Continuation proximal-gradient iteration with λ_n = s.eval(n). With a
/// constant schedule this is the classical proximal-gradient method.
///
/// `reference`, when non-empty, is the minimizer used for M_running.
/// Throws ConfigError for a schedule aimed at another λ or α outside (0, 2/L),
/// NumericalError for non-finite values and DivergenceError when F_λ grows by
/// more than `divergence_factor` relative to F_λ(u0).
SolveResult solve_continuation(const CompositeProblem& p, const LambdaSchedule& s, std::span<const double> u0,
                               const SolverConfig& cfg, std::span<const double> reference = {},
                               const IterateObserver& observer = {});

/// Fixed-λ solve (constant schedule).
SolveResult solve_fixed(const CompositeProblem& p, std::span<const double> u0, const SolverConfig& cfg,
                        const IterateObserver& observer = {});

struct Certificate {
    double gap = 0.0;        ///< φ_λ(u_next) - φ_λ(u_λ)
    double eps = 0.0;        ///< α M |λ - λ_n|
    double deviation = 0.0;  ///< |g(u_λ) - g(u_next)| at this step
};

/// Inexactness of u_next as a solution of the target-λ prox subproblem
/// φ_λ(z) = ½||z - (u_n - α∇f(u_n))||² + α λ g(z), whose exact minimizer is u_λ.
Certificate epsilon_certificate(const CompositeProblem& p, std::span<const double> u_n, std::span<const double> u_next,
                                double alpha, double lambda_n, double M);

struct RateEntry {
    std::size_t n = 0;
    double lhs = 0.0;  ///< F_λ(ū_n) - F_λ(û)
    double rhs = 0.0;  ///< (||u0 - û||² + M λ̄) / (2α(n+1))
    double margin() const { return rhs - lhs; }
};

struct RateReport {
    bool applicable = true;  ///< false when α >= 1/L or no averaged values were recorded
    bool passed = true;
    double worst_margin = 0.0;
    std::vector<RateEntry> entries;
    std::string note;
};

inline constexpr double kRateSlack = 1e-9;

/// Checks F_λ(ū_n) - F_λ(û) <= (||u0 - û||² + M λ̄)/(2α(n+1)) at every trace point
/// carrying F_avg, with absolute slack kRateSlack.
RateReport rate_bound_check(const CompositeProblem& p, std::span<const TracePoint> trace, std::span<const double> u0,
                            std::span<const double> u_hat_ref, double alpha, double lambda_bar, double M);

/// Same check from precomputed scalars (used when re-checking exported traces).
RateReport rate_bound_check(std::span<const TracePoint> trace, double dist0_sq, double F_ref, double alpha,
                            double lipschitz, double lambda_bar, double M);

struct CertificateReport {
    bool passed = true;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();  ///< max(gap - eps)
};

inline constexpr double kCertificateSlack = 1e-12;

/// gap_n <= eps_n + kCertificateSlack at every trace point carrying both values.
CertificateReport certificate_check(std::span<const TracePoint> trace);

}  // namespace fpc
