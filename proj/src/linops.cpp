#include "fpc/linops.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fpc/errors.hpp"

namespace fpc {

Vector LinearOperator::apply(std::span<const double> x) const {
    require_same_size(in_dim(), x.size(), "LinearOperator::apply");
    Vector out(out_dim());
    apply_into(x, out);
    return out;
}

Vector LinearOperator::adjoint(std::span<const double> y) const {
    require_same_size(out_dim(), y.size(), "LinearOperator::adjoint");
    Vector out(in_dim());
    adjoint_into(y, out);
    return out;
}

// --- identity / diagonal / dense ------------------------------------------

IdentityOperator::IdentityOperator(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InputError("IdentityOperator: dimension must be positive");
}

void IdentityOperator::apply_into(std::span<const double> x, std::span<double> out) const {
    std::copy(x.begin(), x.end(), out.begin());
}

void IdentityOperator::adjoint_into(std::span<const double> y, std::span<double> out) const {
    std::copy(y.begin(), y.end(), out.begin());
}

DiagonalOperator::DiagonalOperator(Vector diagonal) : diag_(std::move(diagonal)) {
    if (diag_.empty()) throw InputError("DiagonalOperator: empty diagonal");
}

void DiagonalOperator::apply_into(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < diag_.size(); ++i) out[i] = diag_[i] * x[i];
}

void DiagonalOperator::adjoint_into(std::span<const double> y, std::span<double> out) const {
    apply_into(y, out);
}

MatrixOperator::MatrixOperator(std::size_t rows, std::size_t cols, Vector entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw InputError("MatrixOperator: dimensions must be positive");
    require_same_size(rows * cols, a_.size(), "MatrixOperator");
}

void MatrixOperator::apply_into(std::span<const double> x, std::span<double> out) const {
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        const double* row = a_.data() + r * cols_;
        for (std::size_t c = 0; c < cols_; ++c) s += row[c] * x[c];
        out[r] = s;
    }
}

void MatrixOperator::adjoint_into(std::span<const double> y, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        const double* row = a_.data() + r * cols_;
        for (std::size_t c = 0; c < cols_; ++c) out[c] += row[c] * y[r];
    }
}

// --- convolution -----------------------------------------------------------

ConvKernel::ConvKernel(std::size_t k, Vector t) : size(k), taps(std::move(t)) {
    if (k == 0 || k % 2 == 0) throw InputError("ConvKernel: side must be odd, got " + std::to_string(k));
    require_same_size(k * k, taps.size(), "ConvKernel");
}

double ConvKernel::normalization() const {
    double s = 0.0;
    for (double t : taps) s += t;
    return s;
}

ConvKernel ConvKernel::point_reflected() const {
    Vector r(taps.size());
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) r[i * size + j] = at(size - 1 - i, size - 1 - j);
    return ConvKernel(size, std::move(r));
}

ConvKernel ConvKernel::delta(std::size_t k) {
    Vector t(k * k, 0.0);
    t[(k / 2) * k + k / 2] = 1.0;
    return ConvKernel(k, std::move(t));
}

ConvKernel ConvKernel::box(std::size_t k) {
    return ConvKernel(k, Vector(k * k, 1.0 / static_cast<double>(k * k)));
}

ConvKernel ConvKernel::gaussian(std::size_t k, double sigma) {
    if (!(sigma > 0.0)) throw InputError("ConvKernel::gaussian: sigma must be positive");
    Vector t(k * k);
    const double c = static_cast<double>(k / 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double di = static_cast<double>(i) - c;
            const double dj = static_cast<double>(j) - c;
            t[i * k + j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
            sum += t[i * k + j];
        }
    }
    for (double& v : t) v /= sum;
    return ConvKernel(k, std::move(t));
}

namespace {

void check_kernel_fits(std::size_t h, std::size_t w, const ConvKernel& k) {
    if (k.size == 0 || k.size % 2 == 0) throw InputError("convolution: kernel side must be odd");
    if (k.size > h || k.size > w)
        throw InputError("convolution: " + std::to_string(k.size) + "x" + std::to_string(k.size) +
                         " kernel does not fit a " + std::to_string(h) + "x" + std::to_string(w) + " image");
}

void convolve_periodic(std::span<const double> x, std::size_t h, std::size_t w, const ConvKernel& k,
                       std::span<double> out) {
    const std::size_t ks = k.size;
    const std::size_t rad = k.radius();
    for (std::size_t r = 0; r < h; ++r) {
        double* orow = out.data() + r * w;
        std::fill(orow, orow + w, 0.0);
        for (std::size_t i = 0; i < ks; ++i) {
            const double* xrow = x.data() + ((r + h + rad - i) % h) * w;
            for (std::size_t j = 0; j < ks; ++j) {
                const double kij = k.taps[i * ks + j];
                // Source column of output column c is (c + shift) mod w.
                const std::size_t shift = (w + rad - j) % w;
                const std::size_t split = w - shift;
                for (std::size_t c = 0; c < split; ++c) orow[c] += kij * xrow[c + shift];
                for (std::size_t c = split; c < w; ++c) orow[c] += kij * xrow[c - split];
            }
        }
    }
}

}  // namespace

Image conv2d_periodic(const Image& image, const ConvKernel& kernel) {
    require_same_size(image.height * image.width, image.pixels.size(), "conv2d_periodic");
    check_kernel_fits(image.height, image.width, kernel);
    Image out(image.height, image.width);
    convolve_periodic(image.pixels, image.height, image.width, kernel, out.pixels);
    return out;
}

PeriodicConvolution::PeriodicConvolution(std::size_t height, std::size_t width, ConvKernel kernel)
    : h_(height), w_(width), kernel_(std::move(kernel)), reflected_(kernel_.point_reflected()) {
    if (h_ == 0 || w_ == 0) throw InputError("PeriodicConvolution: dimensions must be positive");
    check_kernel_fits(h_, w_, kernel_);
}

void PeriodicConvolution::apply_into(std::span<const double> x, std::span<double> out) const {
    convolve_periodic(x, h_, w_, kernel_, out);
}

void PeriodicConvolution::adjoint_into(std::span<const double> y, std::span<double> out) const {
    convolve_periodic(y, h_, w_, reflected_, out);
}

// --- wavelets --------------------------------------------------------------

std::array<double, 6> daubechies3_highpass() {
    std::array<double, 6> g{};
    for (std::size_t k = 0; k < 6; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        g[k] = sign * kDaubechies3Lowpass[5 - k];
    }
    return g;
}

namespace {

const std::array<double, 6> kHighpass = daubechies3_highpass();

void require_even(std::size_t n) {
    if (n < 2 || n % 2 != 0) throw InputError("dwt: signal length must be even, got " + std::to_string(n));
}

// Strided 1D kernels so rows and columns share one code path.
void analysis_strided(const double* x, std::size_t n, std::size_t stride, double* out, std::size_t out_stride) {
    const std::size_t half = n / 2;
    const double* h = kDaubechies3Lowpass.data();
    const double* g = kHighpass.data();
    // Interior outputs read x[2i .. 2i+5] without wrapping.
    const std::size_t interior = n >= 6 ? (n - 6) / 2 + 1 : 0;
    for (std::size_t i = 0; i < interior; ++i) {
        const double* xi = x + 2 * i * stride;
        double a = 0.0;
        double d = 0.0;
        for (std::size_t k = 0; k < 6; ++k) {
            const double v = xi[k * stride];
            a += h[k] * v;
            d += g[k] * v;
        }
        out[i * out_stride] = a;
        out[(half + i) * out_stride] = d;
    }
    for (std::size_t i = interior; i < half; ++i) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t k = 0; k < 6; ++k) {
            const double v = x[((2 * i + k) % n) * stride];
            a += h[k] * v;
            d += g[k] * v;
        }
        out[i * out_stride] = a;
        out[(half + i) * out_stride] = d;
    }
}

void synthesis_strided(const double* c, std::size_t n, std::size_t stride, double* out, std::size_t out_stride) {
    const std::size_t half = n / 2;
    const double* h = kDaubechies3Lowpass.data();
    const double* g = kHighpass.data();
    for (std::size_t m = 0; m < n; ++m) out[m * out_stride] = 0.0;
    const std::size_t interior = n >= 6 ? (n - 6) / 2 + 1 : 0;
    for (std::size_t i = 0; i < interior; ++i) {
        const double a = c[i * stride];
        const double d = c[(half + i) * stride];
        double* oi = out + 2 * i * out_stride;
        for (std::size_t k = 0; k < 6; ++k) oi[k * out_stride] += h[k] * a + g[k] * d;
    }
    for (std::size_t i = interior; i < half; ++i) {
        const double a = c[i * stride];
        const double d = c[(half + i) * stride];
        for (std::size_t k = 0; k < 6; ++k) out[((2 * i + k) % n) * out_stride] += h[k] * a + g[k] * d;
    }
}

void check_wavelet_shape(std::size_t size, std::size_t h, std::size_t w, int levels) {
    require_same_size(h * w, size, "dwt");
    if (levels < 0) throw InputError("dwt: negative level count");
    if (levels > 0) {
        const std::size_t block = std::size_t{1} << levels;
        if (h % block != 0 || w % block != 0)
            throw InputError("dwt: " + std::to_string(h) + "x" + std::to_string(w) +
                             " grid is not divisible by 2^" + std::to_string(levels));
    }
}

// Column passes run across whole rows at once so the inner loops are contiguous.
void columns_analysis(double* block, std::size_t bh, std::size_t bw, std::size_t w, std::vector<double>& tmp) {
    const std::size_t half = bh / 2;
    tmp.assign(bh * bw, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        double* a = tmp.data() + i * bw;
        double* d = tmp.data() + (half + i) * bw;
        for (std::size_t k = 0; k < 6; ++k) {
            const double* src = block + ((2 * i + k) % bh) * w;
            const double hk = kDaubechies3Lowpass[k];
            const double gk = kHighpass[k];
            for (std::size_t c = 0; c < bw; ++c) {
                a[c] += hk * src[c];
                d[c] += gk * src[c];
            }
        }
    }
    for (std::size_t r = 0; r < bh; ++r) std::copy_n(tmp.data() + r * bw, bw, block + r * w);
}

void columns_synthesis(double* block, std::size_t bh, std::size_t bw, std::size_t w, std::vector<double>& tmp) {
    const std::size_t half = bh / 2;
    tmp.assign(bh * bw, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        const double* a = block + i * w;
        const double* d = block + (half + i) * w;
        for (std::size_t k = 0; k < 6; ++k) {
            double* dst = tmp.data() + ((2 * i + k) % bh) * bw;
            const double hk = kDaubechies3Lowpass[k];
            const double gk = kHighpass[k];
            for (std::size_t c = 0; c < bw; ++c) dst[c] += hk * a[c] + gk * d[c];
        }
    }
    for (std::size_t r = 0; r < bh; ++r) std::copy_n(tmp.data() + r * bw, bw, block + r * w);
}

void forward_2d(std::span<const double> v, std::size_t h, std::size_t w, int levels, std::span<double> out) {
    std::copy(v.begin(), v.end(), out.begin());
    std::vector<double> buf(w);
    std::vector<double> tmp;
    for (int lev = 0; lev < levels; ++lev) {
        const std::size_t bh = h >> lev;
        const std::size_t bw = w >> lev;
        for (std::size_t r = 0; r < bh; ++r) {
            double* row = out.data() + r * w;
            analysis_strided(row, bw, 1, buf.data(), 1);
            std::copy_n(buf.data(), bw, row);
        }
        columns_analysis(out.data(), bh, bw, w, tmp);
    }
}

void inverse_2d(std::span<const double> coeffs, std::size_t h, std::size_t w, int levels, std::span<double> out) {
    std::copy(coeffs.begin(), coeffs.end(), out.begin());
    std::vector<double> buf(w);
    std::vector<double> tmp;
    for (int lev = levels - 1; lev >= 0; --lev) {
        const std::size_t bh = h >> lev;
        const std::size_t bw = w >> lev;
        columns_synthesis(out.data(), bh, bw, w, tmp);
        for (std::size_t r = 0; r < bh; ++r) {
            double* row = out.data() + r * w;
            synthesis_strided(row, bw, 1, buf.data(), 1);
            std::copy_n(buf.data(), bw, row);
        }
    }
}

}  // namespace

void dwt1d_forward(std::span<const double> x, std::span<double> out) {
    require_even(x.size());
    require_same_size(x.size(), out.size(), "dwt1d_forward");
    analysis_strided(x.data(), x.size(), 1, out.data(), 1);
}

void dwt1d_inverse(std::span<const double> coeffs, std::span<double> out) {
    require_even(coeffs.size());
    require_same_size(coeffs.size(), out.size(), "dwt1d_inverse");
    synthesis_strided(coeffs.data(), coeffs.size(), 1, out.data(), 1);
}

Vector dwt_forward(std::span<const double> v, std::size_t height, std::size_t width, int levels) {
    check_wavelet_shape(v.size(), height, width, levels);
    Vector out(v.size());
    forward_2d(v, height, width, levels, out);
    return out;
}

Vector dwt_inverse(std::span<const double> coeffs, std::size_t height, std::size_t width, int levels) {
    check_wavelet_shape(coeffs.size(), height, width, levels);
    Vector out(coeffs.size());
    inverse_2d(coeffs, height, width, levels, out);
    return out;
}

WaveletTransform::WaveletTransform(std::size_t height, std::size_t width, int levels)
    : h_(height), w_(width), levels_(levels) {
    if (h_ == 0 || w_ == 0) throw InputError("WaveletTransform: dimensions must be positive");
    check_wavelet_shape(h_ * w_, h_, w_, levels_);
}

void WaveletTransform::apply_into(std::span<const double> x, std::span<double> out) const {
    forward_2d(x, h_, w_, levels_, out);
}

void WaveletTransform::adjoint_into(std::span<const double> y, std::span<double> out) const {
    inverse_2d(y, h_, w_, levels_, out);
}

// --- combinators -----------------------------------------------------------

namespace {

class AdjointOperator final : public LinearOperator {
public:
    explicit AdjointOperator(OperatorPtr op) : op_(std::move(op)) {}
    std::size_t in_dim() const override { return op_->out_dim(); }
    std::size_t out_dim() const override { return op_->in_dim(); }

protected:
    void apply_into(std::span<const double> x, std::span<double> out) const override {
        const Vector r = op_->adjoint(x);
        std::copy(r.begin(), r.end(), out.begin());
    }
    void adjoint_into(std::span<const double> y, std::span<double> out) const override {
        const Vector r = op_->apply(y);
        std::copy(r.begin(), r.end(), out.begin());
    }

private:
    OperatorPtr op_;
};

class ComposedOperator final : public LinearOperator {
public:
    ComposedOperator(OperatorPtr outer, OperatorPtr inner) : outer_(std::move(outer)), inner_(std::move(inner)) {}
    std::size_t in_dim() const override { return inner_->in_dim(); }
    std::size_t out_dim() const override { return outer_->out_dim(); }

protected:
    void apply_into(std::span<const double> x, std::span<double> out) const override {
        const Vector r = outer_->apply(inner_->apply(x));
        std::copy(r.begin(), r.end(), out.begin());
    }
    void adjoint_into(std::span<const double> y, std::span<double> out) const override {
        const Vector r = inner_->adjoint(outer_->adjoint(y));
        std::copy(r.begin(), r.end(), out.begin());
    }

private:
    OperatorPtr outer_;
    OperatorPtr inner_;
};

}  // namespace

OperatorPtr adjoint_of(OperatorPtr op) {
    if (!op) throw InputError("adjoint_of: null operator");
    return std::make_shared<AdjointOperator>(std::move(op));
}

OperatorPtr compose(OperatorPtr outer, OperatorPtr inner) {
    if (!outer || !inner) throw InputError("compose: null operator");
    if (inner->out_dim() != outer->in_dim())
        throw InputError("compose: inner output dimension " + std::to_string(inner->out_dim()) +
                         " does not match outer input dimension " + std::to_string(outer->in_dim()));
    return std::make_shared<ComposedOperator>(std::move(outer), std::move(inner));
}

// --- norm estimation -------------------------------------------------------

NormEstimate operator_norm_sq(const LinearOperator& op, double tol, int max_iter, std::uint64_t seed) {
    if (!(tol > 0.0)) throw InputError("operator_norm_sq: tol must be positive");
    if (max_iter < 1) throw InputError("operator_norm_sq: max_iter must be at least 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(op.in_dim());
    for (double& x : v) x = normal(rng);
    double nv = norm2(v);
    for (double& x : v) x /= nv;

    NormEstimate est;
    double prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vector w = op.adjoint(op.apply(v));
        const double rq = dot(v, w);  // <v, A*A v> = ||A v||^2 with ||v|| = 1
        est.history.push_back(rq);
        est.value = rq;
        est.iterations = it;
        const double nw = norm2(w);
        if (nw == 0.0) return est;  // v in the null space; only possible for the zero operator
        if (it > 1 && std::abs(rq - prev) <= tol * std::abs(rq)) return est;
        prev = rq;
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nw;
    }
    throw NonConvergenceError("operator_norm_sq: no convergence in " + std::to_string(max_iter) + " iterations",
                              est.value);
}

}  // namespace fpc
