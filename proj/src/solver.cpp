#include "fpc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fpc/errors.hpp"

namespace fpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kDenseRecordLimit = 10000;
constexpr std::size_t kSparseRecordStride = 10;

void require_finite(std::span<const double> v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            throw NumericalError(std::string(what) + ": non-finite entry at index " + std::to_string(i), i);
    }
}

Vector forward_point(std::span<const double> u, std::span<const double> grad, double alpha) {
    Vector x(u.begin(), u.end());
    axpy(-alpha, grad, x);
    return x;
}

// φ(a) - φ(b) for φ(z) = ½||z - x||² + t g(z), written to limit cancellation.
double prox_objective_difference(const ProxTerm& g, std::span<const double> x, double t, std::span<const double> a,
                                 std::span<const double> b) {
    double quad = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) quad += (a[i] - b[i]) * (a[i] + b[i] - 2.0 * x[i]);
    return 0.5 * quad + t * (g.value(a) - g.value(b));
}

Certificate certificate_at(const CompositeProblem& p, std::span<const double> forward, std::span<const double> u_next,
                           double alpha, double lambda_n, double M) {
    const Vector u_lambda = p.g->prox(forward, alpha * p.lambda);
    Certificate c;
    c.gap = prox_objective_difference(*p.g, forward, alpha * p.lambda, u_next, u_lambda);
    c.deviation = std::abs(p.g->value(u_lambda) - p.g->value(u_next));
    c.eps = alpha * M * std::abs(p.lambda - lambda_n);
    return c;
}

bool should_record(std::size_t n, std::size_t record_every) {
    if (record_every == 0) return n < kDenseRecordLimit || n % kSparseRecordStride == 0;
    return n % record_every == 0;
}

void mean_into(std::span<const double> sum, std::size_t count, Vector& out) {
    out.resize(sum.size());
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < sum.size(); ++i) out[i] = sum[i] * inv;
}

}  // namespace

Vector prox_grad_step(const CompositeProblem& p, std::span<const double> u, double alpha, double lambda_n) {
    if (!(alpha > 0.0)) throw ConfigError("prox_grad_step: alpha must be positive");
    if (!(lambda_n > 0.0)) throw ConfigError("prox_grad_step: lambda_n must be positive");
    require_same_size(p.dim(), u.size(), "prox_grad_step");
    const Vector grad = p.f->gradient(u);
    require_finite(grad, "prox_grad_step gradient");
    return p.g->prox(forward_point(u, grad, alpha), alpha * lambda_n);
}

Certificate epsilon_certificate(const CompositeProblem& p, std::span<const double> u_n, std::span<const double> u_next,
                                double alpha, double lambda_n, double M) {
    require_same_size(p.dim(), u_n.size(), "epsilon_certificate");
    require_same_size(p.dim(), u_next.size(), "epsilon_certificate");
    const Vector grad = p.f->gradient(u_n);
    require_finite(grad, "epsilon_certificate gradient");
    return certificate_at(p, forward_point(u_n, grad, alpha), u_next, alpha, lambda_n, M);
}

SolveResult solve_continuation(const CompositeProblem& p, const LambdaSchedule& s, std::span<const double> u0,
                               const SolverConfig& cfg, std::span<const double> reference,
                               const IterateObserver& observer) {
    require_same_size(p.dim(), u0.size(), "solve_continuation initial point");
    if (!reference.empty()) require_same_size(p.dim(), reference.size(), "solve_continuation reference");
    require_finite(u0, "solve_continuation initial point");

    const double lam = p.lambda;
    if (std::abs(s.target() - lam) > 1e-12 * lam)
        throw ConfigError("schedule target " + std::to_string(s.target()) + " differs from problem lambda " +
                          std::to_string(lam));
    const double L = p.f->lipschitz();
    if (!(cfg.alpha > 0.0) || !(cfg.alpha < 2.0 / L))
        throw ConfigError("step size alpha=" + std::to_string(cfg.alpha) + " outside (0, 2/L) with L=" +
                          std::to_string(L));

    SolveResult res;
    res.schedule_report = validate(s);
    for (const auto& issue : res.schedule_report.issues) res.warnings.push_back("schedule: " + issue);

    bool rate_on = cfg.rate_monitor;
    if (rate_on && !(cfg.alpha < 1.0 / L)) {
        rate_on = false;
        res.warnings.push_back("rate monitor disabled: alpha >= 1/L");
    }
    res.rate_monitor_active = rate_on;

    Vector u(u0.begin(), u0.end());
    Vector grad;
    double f_u = p.f->value_and_gradient(u, grad);
    res.f0 = f_u;
    res.g0 = p.g->value(u);
    const double F0 = f_u + lam * res.g0;
    if (!std::isfinite(F0)) throw NumericalError("solve_continuation: F(u0) is not finite", 0);
    const double blowup = F0 + cfg.divergence_factor * std::max(std::abs(F0), 1.0);

    const double g_ref = reference.empty() ? 0.0 : p.g->value(reference);
    std::vector<double> g_history;
    if (reference.empty()) g_history.push_back(res.g0);
    else res.M_running = std::abs(res.g0 - g_ref);

    Vector avg_sum;
    Vector avg;
    if (rate_on) avg_sum.assign(u.size(), 0.0);

    Vector grad_next;
    for (std::size_t n = 0; n < cfg.max_iter; ++n) {
        const double lam_n = s.eval(n);
        require_finite(grad, "gradient");
        const Vector forward = forward_point(u, grad, cfg.alpha);
        Vector u_next = p.g->prox(forward, cfg.alpha * lam_n);

        TracePoint tp;
        tp.n = n;
        tp.lambda_n = lam_n;

        if (cfg.certificate_monitor) {
            Certificate c = certificate_at(p, forward, u_next, cfg.alpha, lam_n, 0.0);
            res.M_certificate = std::max(res.M_certificate, c.deviation);
            tp.gap_n = c.gap;
            tp.eps_n = cfg.alpha * res.M_certificate * std::abs(lam - lam_n);
        }

        const double step = distance(u_next, u);
        res.step_sq_sum += step * step;

        const double f_next = p.f->value_and_gradient(u_next, grad_next);
        const double g_next = p.g->value(u_next);
        const double F_next = f_next + lam * g_next;
        if (!std::isfinite(F_next)) throw NumericalError("objective became non-finite at iteration " + std::to_string(n), n);
        if (F_next > blowup)
            throw DivergenceError("objective diverged at iteration " + std::to_string(n) + " (F=" +
                                      std::to_string(F_next) + ", F0=" + std::to_string(F0) + ")",
                                  n);

        if (reference.empty()) g_history.push_back(g_next);
        else res.M_running = std::max(res.M_running, std::abs(g_next - g_ref));

        tp.f_val = f_next;
        tp.g_val = g_next;
        tp.F_lambda_val = F_next;
        tp.step_norm = step;

        const bool stop = step <= cfg.step_tol && std::abs(lam_n - lam) <= cfg.lambda_rtol * lam;
        const bool last = stop || n + 1 == cfg.max_iter;

        if (rate_on) {
            axpy(1.0, u_next, avg_sum);
            if (last || should_record(n, cfg.record_every)) {
                mean_into(avg_sum, n + 1, avg);
                tp.F_avg = composite_value(p, avg);
            }
        }
        if (last || should_record(n, cfg.record_every)) res.trace.push_back(tp);
        if (observer) observer(n, u_next);

        u.swap(u_next);
        grad.swap(grad_next);
        res.iterations = n + 1;
        if (stop) {
            res.converged = true;
            break;
        }
    }

    if (reference.empty()) {
        const double g_final = g_history.back();
        for (double gv : g_history) res.M_running = std::max(res.M_running, std::abs(gv - g_final));
    }
    res.u_hat = std::move(u);
    return res;
}

SolveResult solve_fixed(const CompositeProblem& p, std::span<const double> u0, const SolverConfig& cfg,
                        const IterateObserver& observer) {
    return solve_continuation(p, LambdaSchedule::constant(p.lambda), u0, cfg, {}, observer);
}

RateReport rate_bound_check(std::span<const TracePoint> trace, double dist0_sq, double F_ref, double alpha,
                            double lipschitz, double lambda_bar, double M) {
    RateReport r;
    if (!(alpha > 0.0) || !(alpha < 1.0 / lipschitz)) {
        r.applicable = false;
        r.note = "alpha outside (0, 1/L)";
        return r;
    }
    if (!std::isfinite(lambda_bar)) {
        r.applicable = false;
        r.note = "schedule not summable";
        return r;
    }
    r.worst_margin = kInf;
    for (const TracePoint& tp : trace) {
        if (!tp.F_avg) continue;
        RateEntry e;
        e.n = tp.n;
        e.lhs = *tp.F_avg - F_ref;
        e.rhs = (dist0_sq + M * lambda_bar) / (2.0 * alpha * static_cast<double>(tp.n + 1));
        r.worst_margin = std::min(r.worst_margin, e.margin());
        if (e.margin() < -kRateSlack) r.passed = false;
        r.entries.push_back(e);
    }
    if (r.entries.empty()) {
        r.applicable = false;
        r.note = "no averaged objective values recorded";
        r.worst_margin = 0.0;
    }
    return r;
}

RateReport rate_bound_check(const CompositeProblem& p, std::span<const TracePoint> trace, std::span<const double> u0,
                            std::span<const double> u_hat_ref, double alpha, double lambda_bar, double M) {
    require_same_size(p.dim(), u0.size(), "rate_bound_check");
    require_same_size(p.dim(), u_hat_ref.size(), "rate_bound_check");
    const double d0 = distance(u0, u_hat_ref);
    return rate_bound_check(trace, d0 * d0, composite_value(p, u_hat_ref), alpha, p.f->lipschitz(), lambda_bar, M);
}

CertificateReport certificate_check(std::span<const TracePoint> trace) {
    CertificateReport r;
    for (const TracePoint& tp : trace) {
        if (!tp.gap_n || !tp.eps_n) continue;
        ++r.checked;
        const double excess = *tp.gap_n - *tp.eps_n;
        r.worst_excess = std::max(r.worst_excess, excess);
        if (excess > kCertificateSlack) {
            ++r.violations;
            r.passed = false;
        }
    }
    return r;
}

}  // namespace fpc
