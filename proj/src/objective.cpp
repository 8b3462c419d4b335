#include "fpc/objective.hpp"

#include <cmath>
#include <string>

#include "fpc/errors.hpp"

namespace fpc {

LeastSquaresTerm::LeastSquaresTerm(OperatorPtr op, Vector target, double op_norm_sq)
    : op_(std::move(op)), target_(std::move(target)), op_norm_sq_(op_norm_sq) {
    if (!op_) throw InputError("least_squares_term: null operator");
    require_same_size(op_->out_dim(), target_.size(), "least_squares_term");
    if (!(op_norm_sq_ > 0.0) || !std::isfinite(op_norm_sq_))
        throw InputError("least_squares_term: operator norm must be positive and finite");
}

double LeastSquaresTerm::value(std::span<const double> u) const {
    const Vector r = op_->apply(u) - std::span<const double>(target_);
    return norm2_squared(r);
}

Vector LeastSquaresTerm::gradient(std::span<const double> u) const {
    Vector g;
    value_and_gradient(u, g);
    return g;
}

double LeastSquaresTerm::value_and_gradient(std::span<const double> u, Vector& grad) const {
    const Vector r = op_->apply(u) - std::span<const double>(target_);
    grad = op_->adjoint(r);
    for (double& v : grad) v *= 2.0;
    return norm2_squared(r);
}

std::shared_ptr<const LeastSquaresTerm> least_squares_term(OperatorPtr op, Vector target) {
    if (!op) throw InputError("least_squares_term: null operator");
    const double n2 = operator_norm_sq(*op).value;
    return std::make_shared<LeastSquaresTerm>(std::move(op), std::move(target), n2);
}

std::shared_ptr<const LeastSquaresTerm> least_squares_term(OperatorPtr op, Vector target, double op_norm_sq) {
    return std::make_shared<LeastSquaresTerm>(std::move(op), std::move(target), op_norm_sq);
}

ScaledQuadraticTerm::ScaledQuadraticTerm(double curvature, Vector center)
    : c_(curvature), center_(std::move(center)) {
    if (!(c_ > 0.0)) throw InputError("ScaledQuadraticTerm: curvature must be positive");
    if (center_.empty()) throw InputError("ScaledQuadraticTerm: empty center");
}

double ScaledQuadraticTerm::value(std::span<const double> u) const {
    return 0.5 * c_ * norm2_squared(u - std::span<const double>(center_));
}

Vector ScaledQuadraticTerm::gradient(std::span<const double> u) const {
    Vector g = u - std::span<const double>(center_);
    for (double& v : g) v *= c_;
    return g;
}

double soft_threshold(double a, double t) {
    if (a > t) return a - t;
    if (a < -t) return a + t;
    return 0.0;
}

double L1Term::value(std::span<const double> u) const { return norm1(u); }

Vector L1Term::prox(std::span<const double> a, double t) const {
    if (!(t > 0.0)) throw InputError("l1 prox: threshold must be positive, got " + std::to_string(t));
    Vector p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = soft_threshold(a[i], t);
    return p;
}

Vector ZeroTerm::prox(std::span<const double> a, double t) const {
    if (!(t > 0.0)) throw InputError("zero prox: threshold must be positive");
    return Vector(a.begin(), a.end());
}

ProxPtr l1_term() { return std::make_shared<L1Term>(); }

CompositeProblem::CompositeProblem(SmoothPtr f_, ProxPtr g_, double lambda_)
    : f(std::move(f_)), g(std::move(g_)), lambda(lambda_) {
    if (!f || !g) throw InputError("CompositeProblem: null term");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw InputError("CompositeProblem: lambda must be positive and finite");
}

double composite_value(const CompositeProblem& p, std::span<const double> u) {
    require_same_size(p.dim(), u.size(), "composite_value");
    return p.f->value(u) + p.lambda * p.g->value(u);
}

}  // namespace fpc
