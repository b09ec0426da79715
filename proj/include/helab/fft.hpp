#pragma once

#include <complex>
#include <cstddef>

namespace helab::fft {

/// Forward transform of n^3 real samples (x fastest) into n*n*(n/2+1)
/// coefficients, normalized so that f(x) = sum_k c_k exp(i k.x).
/// n need not be a power of two (padded grids use 3n/2).
void forward(int n, const double* samples, std::complex<double>* coefficients);

/// Inverse of forward(). The input is left untouched.
void inverse(int n, const std::complex<double>* coefficients, double* samples);

inline std::size_t real_size(int n) { return static_cast<std::size_t>(n) * n * n; }
inline std::size_t half_size(int n) { return static_cast<std::size_t>(n) * n * (n / 2 + 1); }

}  // namespace helab::fft
