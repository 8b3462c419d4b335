#include "fpc/vector.hpp"

#include <cmath>
#include <string>

#include "fpc/errors.hpp"

namespace fpc {

double dot(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2_squared(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(norm2_squared(x)); }

double norm1(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

double distance(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size(), "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    require_same_size(y.size(), x.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector operator-(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size(), "subtract");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_same_size(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual) {
        throw InputError(std::string(what) + ": dimension mismatch (expected " +
                         std::to_string(expected) + ", got " + std::to_string(actual) + ")");
    }
}

}  // namespace fpc
