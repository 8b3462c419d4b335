#pragma once

#include <memory>
#include <span>

#include "fpc/linops.hpp"
#include "fpc/vector.hpp"

namespace fpc {

/// Differentiable convex term with an L-Lipschitz gradient.
class SmoothTerm {
public:
    virtual ~SmoothTerm() = default;
    virtual std::size_t dim() const = 0;
    virtual double value(std::span<const double> u) const = 0;
    virtual Vector gradient(std::span<const double> u) const = 0;
    virtual double lipschitz() const = 0;

    /// Returns f(u) and writes ∇f(u); overridden where the two share work.
    virtual double value_and_gradient(std::span<const double> u, Vector& grad) const {
        grad = gradient(u);
        return value(u);
    }
};

/// Convex term whose proximal map prox_{t g}(a) = argmin_p ½||p - a||² + t g(p)
/// has a cheap exact evaluation. `value` may return +inf outside the domain.
class ProxTerm {
public:
    virtual ~ProxTerm() = default;
    virtual double value(std::span<const double> u) const = 0;
    /// Throws InputError for t <= 0.
    virtual Vector prox(std::span<const double> a, double t) const = 0;
};

using SmoothPtr = std::shared_ptr<const SmoothTerm>;
using ProxPtr = std::shared_ptr<const ProxTerm>;

/// f(u) = ||op(u) - target||²  (no ½ factor), grad = 2 op*(op(u) - target),
/// L = 2 ||op||².
class LeastSquaresTerm final : public SmoothTerm {
public:
    LeastSquaresTerm(OperatorPtr op, Vector target, double op_norm_sq);

    std::size_t dim() const override { return op_->in_dim(); }
    double value(std::span<const double> u) const override;
    Vector gradient(std::span<const double> u) const override;
    double lipschitz() const override { return 2.0 * op_norm_sq_; }

    double value_and_gradient(std::span<const double> u, Vector& grad) const override;

    const LinearOperator& op() const { return *op_; }
    const Vector& target() const { return target_; }

private:
    OperatorPtr op_;
    Vector target_;
    double op_norm_sq_;
};

/// Builds the least-squares term, estimating ||op||² by power iteration
/// (tol 1e-9, 10,000 iterations, seed 0).
std::shared_ptr<const LeastSquaresTerm> least_squares_term(OperatorPtr op, Vector target);

/// Same with a caller-supplied ||op||².
std::shared_ptr<const LeastSquaresTerm> least_squares_term(OperatorPtr op, Vector target, double op_norm_sq);

/// f(u) = (c/2) ||u - center||², grad = c (u - center), L = c.
class ScaledQuadraticTerm final : public SmoothTerm {
public:
    ScaledQuadraticTerm(double curvature, Vector center);
    std::size_t dim() const override { return center_.size(); }
    double value(std::span<const double> u) const override;
    Vector gradient(std::span<const double> u) const override;
    double lipschitz() const override { return c_; }

private:
    double c_;
    Vector center_;
};

/// g(u) = ||u||_1, prox is the componentwise soft threshold. Ties |a_i| = t map to 0.
class L1Term final : public ProxTerm {
public:
    double value(std::span<const double> u) const override;
    Vector prox(std::span<const double> a, double t) const override;
};

/// g ≡ 0; prox is the identity.
class ZeroTerm final : public ProxTerm {
public:
    double value(std::span<const double>) const override { return 0.0; }
    Vector prox(std::span<const double> a, double t) const override;
};

ProxPtr l1_term();

double soft_threshold(double a, double t);

/// min_u f(u) + λ g(u) with λ > 0.
struct CompositeProblem {
    SmoothPtr f;
    ProxPtr g;
    double lambda = 1.0;

    CompositeProblem() = default;
    /// Throws InputError for null terms or λ <= 0.
    CompositeProblem(SmoothPtr f_, ProxPtr g_, double lambda_);

    std::size_t dim() const { return f->dim(); }
    CompositeProblem with_lambda(double new_lambda) const { return {f, g, new_lambda}; }
};

/// F_λ(u) = f(u) + λ g(u).
double composite_value(const CompositeProblem& p, std::span<const double> u);

}  // namespace fpc
