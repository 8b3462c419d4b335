#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fpc/image.hpp"
#include "fpc/vector.hpp"

namespace fpc {

/// Linear map between coordinate spaces with an exact adjoint.
///
/// Implementations must satisfy <apply(x), y> = <x, adjoint(y)> for all x, y.
/// Operators are immutable after construction; apply/adjoint are const and
/// may be called concurrently.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual std::size_t in_dim() const = 0;
    virtual std::size_t out_dim() const = 0;

    Vector apply(std::span<const double> x) const;
    Vector adjoint(std::span<const double> y) const;

protected:
    // Sizes have been checked by the public wrappers.
    virtual void apply_into(std::span<const double> x, std::span<double> out) const = 0;
    virtual void adjoint_into(std::span<const double> y, std::span<double> out) const = 0;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class IdentityOperator final : public LinearOperator {
public:
    explicit IdentityOperator(std::size_t dim);
    std::size_t in_dim() const override { return dim_; }
    std::size_t out_dim() const override { return dim_; }

protected:
    void apply_into(std::span<const double> x, std::span<double> out) const override;
    void adjoint_into(std::span<const double> y, std::span<double> out) const override;

private:
    std::size_t dim_;
};

class DiagonalOperator final : public LinearOperator {
public:
    explicit DiagonalOperator(Vector diagonal);
    std::size_t in_dim() const override { return diag_.size(); }
    std::size_t out_dim() const override { return diag_.size(); }

protected:
    void apply_into(std::span<const double> x, std::span<double> out) const override;
    void adjoint_into(std::span<const double> y, std::span<double> out) const override;

private:
    Vector diag_;
};

/// Dense row-major matrix.
class MatrixOperator final : public LinearOperator {
public:
    MatrixOperator(std::size_t rows, std::size_t cols, Vector entries);
    std::size_t in_dim() const override { return cols_; }
    std::size_t out_dim() const override { return rows_; }

    double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

protected:
    void apply_into(std::span<const double> x, std::span<double> out) const override;
    void adjoint_into(std::span<const double> y, std::span<double> out) const override;

private:
    std::size_t rows_;
    std::size_t cols_;
    Vector a_;
};

/// Square k×k filter with odd k, stored row-major. Tap (k/2, k/2) is the centre.
struct ConvKernel {
    std::size_t size = 1;
    Vector taps{1.0};

    ConvKernel() = default;
    ConvKernel(std::size_t k, Vector t);

    double at(std::size_t r, std::size_t c) const { return taps[r * size + c]; }
    double normalization() const;  // sum of taps
    std::size_t radius() const { return size / 2; }
    ConvKernel point_reflected() const;

    static ConvKernel delta(std::size_t k);
    static ConvKernel box(std::size_t k);
    /// Sampled isotropic Gaussian, normalized to unit sum.
    static ConvKernel gaussian(std::size_t k, double sigma);
};

/// out(r, c) = sum_{i,j} k(i, j) x(r - i + R, c - j + R) with indices taken
/// modulo the image size (R = kernel radius).
Image conv2d_periodic(const Image& image, const ConvKernel& kernel);

/// Periodic 2D convolution on a fixed grid. The adjoint convolves with the
/// point-reflected kernel.
class PeriodicConvolution final : public LinearOperator {
public:
    PeriodicConvolution(std::size_t height, std::size_t width, ConvKernel kernel);
    std::size_t in_dim() const override { return h_ * w_; }
    std::size_t out_dim() const override { return h_ * w_; }
    const ConvKernel& kernel() const { return kernel_; }

protected:
    void apply_into(std::span<const double> x, std::span<double> out) const override;
    void adjoint_into(std::span<const double> y, std::span<double> out) const override;

private:
    std::size_t h_;
    std::size_t w_;
    ConvKernel kernel_;
    ConvKernel reflected_;
};

// Daubechies filter with three vanishing moments (6 taps), analysis low-pass.
inline constexpr std::array<double, 6> kDaubechies3Lowpass = {
    0.33267055295008263, 0.80689150931109260, 0.45987750211849154,
    -0.13501102001025458, -0.08544127388202666, 0.03522629188570953,
};

/// High-pass partner g[k] = (-1)^k h[5 - k].
std::array<double, 6> daubechies3_highpass();

/// One level of the periodic 1D analysis filter bank. Output holds the
/// n/2 approximation coefficients followed by the n/2 details. n must be even.
void dwt1d_forward(std::span<const double> x, std::span<double> out);
void dwt1d_inverse(std::span<const double> coeffs, std::span<double> out);

/// Orthogonal 2D Daubechies-3 transform, periodic boundary, Mallat layout.
/// Each level transforms rows then columns of the current approximation block.
Vector dwt_forward(std::span<const double> v, std::size_t height, std::size_t width, int levels);
Vector dwt_inverse(std::span<const double> coeffs, std::size_t height, std::size_t width, int levels);

/// W as an operator; its adjoint is the inverse transform W*.
class WaveletTransform final : public LinearOperator {
public:
    WaveletTransform(std::size_t height, std::size_t width, int levels);
    std::size_t in_dim() const override { return h_ * w_; }
    std::size_t out_dim() const override { return h_ * w_; }
    int levels() const { return levels_; }

protected:
    void apply_into(std::span<const double> x, std::span<double> out) const override;
    void adjoint_into(std::span<const double> y, std::span<double> out) const override;

private:
    std::size_t h_;
    std::size_t w_;
    int levels_;
};

/// Swaps apply and adjoint of the wrapped operator.
OperatorPtr adjoint_of(OperatorPtr op);

/// outer ∘ inner; throws InputError unless inner.out_dim == outer.in_dim.
OperatorPtr compose(OperatorPtr outer, OperatorPtr inner);

struct NormEstimate {
    double value = 0.0;           ///< estimate of ||op||_2^2
    int iterations = 0;
    std::vector<double> history;  ///< Rayleigh quotient per iteration
};

/// Power iteration on op* ∘ op from a seeded random start. Stops when the
/// relative change of the Rayleigh quotient drops to `tol`; throws
/// NonConvergenceError (carrying the last estimate) after `max_iter`.
NormEstimate operator_norm_sq(const LinearOperator& op, double tol = 1e-9, int max_iter = 10000,
                              std::uint64_t seed = 0);

}  // namespace fpc
