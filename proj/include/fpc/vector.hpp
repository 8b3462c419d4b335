#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fpc {

/// Dense real coordinate array. Iterates, images and wavelet coefficients
/// all live in this type.
using Vector = std::vector<double>;

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm2_squared(std::span<const double> x);
double norm1(std::span<const double> x);
double distance(std::span<const double> x, std::span<const double> y);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

Vector operator-(std::span<const double> x, std::span<const double> y);

bool all_finite(std::span<const double> x);

// Throws InputError when the sizes differ. `what` names the operation.
void require_same_size(std::size_t expected, std::size_t actual, const char* what);

}  // namespace fpc
