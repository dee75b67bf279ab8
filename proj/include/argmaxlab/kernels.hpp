#pragma once

#include <cstddef>

// Data-parallel inner loops for the set-distance computations.  Each kernel
// has a scalar reference implementation and, on x86-64, an AVX2 variant
// selected at runtime.  The variants are equivalence-tested bit for bit:
// every lane computes (x - q)^2 with the same rounding as the scalar code
// and min/max are exact selections, so results are identical.

namespace argmaxlab::kernels {

enum class Isa { Scalar, Avx2, Neon };

// ISA picked at process start for the dispatched entry points below.
Isa active_isa();

// Minimum squared Euclidean distance from query q (length dim) to n points
// stored row-major in pts.  Returns +inf for n == 0.
double min_sqdist(const double* pts, std::size_t n, std::size_t dim, const double* q);
double min_sqdist_scalar(const double* pts, std::size_t n, std::size_t dim, const double* q);

// max_i |a_i - b_i| over n entries; 0 for n == 0.
double max_abs_diff(const double* a, const double* b, std::size_t n);
double max_abs_diff_scalar(const double* a, const double* b, std::size_t n);

}  // namespace argmaxlab::kernels
