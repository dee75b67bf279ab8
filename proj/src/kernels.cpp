#include "argmaxlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#if defined(__x86_64__) || defined(_M_X64)
#define ARGMAXLAB_X86 1
#include <immintrin.h>
#else
#define ARGMAXLAB_X86 0
#endif

#if defined(__aarch64__)
#define ARGMAXLAB_NEON 1
#include <arm_neon.h>
#else
#define ARGMAXLAB_NEON 0
#endif

namespace argmaxlab::kernels {

double min_sqdist_scalar(const double* pts, std::size_t n, std::size_t dim, const double* q) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    const double* p = pts + i * dim;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = p[k] - q[k];
      d2 += diff * diff;
    }
    best = std::min(best, d2);
  }
  return best;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    best = std::max(best, std::fabs(a[i] - b[i]));
  }
  return best;
}

#if ARGMAXLAB_X86

__attribute__((target("avx2"))) static double hmin4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_min_pd(lo, hi);
  m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

__attribute__((target("avx2"))) static double hmax4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

__attribute__((target("avx2")))
static double min_sqdist_avx2(const double* pts, std::size_t n, std::size_t dim, const double* q) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (dim == 1) {
    __m256d qv = _mm256_set1_pd(q[0]);
    __m256d acc = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      __m256d x = _mm256_loadu_pd(pts + i);
      __m256d d = _mm256_sub_pd(x, qv);
      acc = _mm256_min_pd(acc, _mm256_mul_pd(d, d));
    }
    double best = hmin4(acc);
    for (; i < n; ++i) {
      const double diff = pts[i] - q[0];
      best = std::min(best, diff * diff);
    }
    return best;
  }
  if (dim == 2) {
    // Two points per vector: [x0 y0 x1 y1].
    __m256d qv = _mm256_setr_pd(q[0], q[1], q[0], q[1]);
    __m256d acc = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      __m256d x = _mm256_loadu_pd(pts + 2 * i);
      __m256d d = _mm256_sub_pd(x, qv);
      __m256d sq = _mm256_mul_pd(d, d);
      // [x0^2+y0^2, x1^2+y1^2] in lanes 0 and 2 after swapping halves of pairs.
      __m256d sw = _mm256_permute_pd(sq, 0b0101);
      acc = _mm256_min_pd(acc, _mm256_add_pd(sq, sw));
    }
    double best = hmin4(acc);
    for (; i < n; ++i) {
      const double dx = pts[2 * i] - q[0];
      const double dy = pts[2 * i + 1] - q[1];
      best = std::min(best, dx * dx + dy * dy);
    }
    return best;
  }
  return min_sqdist_scalar(pts, n, dim, q);
}

__attribute__((target("avx2")))
static double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, d));
  }
  double best = hmax4(acc);
  for (; i < n; ++i) best = std::max(best, std::fabs(a[i] - b[i]));
  return best;
}

#endif  // ARGMAXLAB_X86

#if ARGMAXLAB_NEON

static double min_sqdist_neon(const double* pts, std::size_t n, std::size_t dim, const double* q) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (dim == 1) {
    float64x2_t qv = vdupq_n_f64(q[0]);
    float64x2_t acc = vdupq_n_f64(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      float64x2_t d = vsubq_f64(vld1q_f64(pts + i), qv);
      acc = vminq_f64(acc, vmulq_f64(d, d));
    }
    double best = std::min(vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1));
    for (; i < n; ++i) {
      const double diff = pts[i] - q[0];
      best = std::min(best, diff * diff);
    }
    return best;
  }
  return min_sqdist_scalar(pts, n, dim, q);
}

static double max_abs_diff_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vmaxq_f64(acc, vabsq_f64(d));
  }
  double best = std::max(vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1));
  for (; i < n; ++i) best = std::max(best, std::fabs(a[i] - b[i]));
  return best;
}

#endif  // ARGMAXLAB_NEON

static Isa detect_isa() {
#if ARGMAXLAB_X86
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
#if ARGMAXLAB_NEON
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

Isa active_isa() {
  static const Isa isa = detect_isa();
  return isa;
}

double min_sqdist(const double* pts, std::size_t n, std::size_t dim, const double* q) {
  switch (active_isa()) {
#if ARGMAXLAB_X86
    case Isa::Avx2:
      return min_sqdist_avx2(pts, n, dim, q);
#endif
#if ARGMAXLAB_NEON
    case Isa::Neon:
      return min_sqdist_neon(pts, n, dim, q);
#endif
    default:
      return min_sqdist_scalar(pts, n, dim, q);
  }
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  switch (active_isa()) {
#if ARGMAXLAB_X86
    case Isa::Avx2:
      return max_abs_diff_avx2(a, b, n);
#endif
#if ARGMAXLAB_NEON
    case Isa::Neon:
      return max_abs_diff_neon(a, b, n);
#endif
    default:
      return max_abs_diff_scalar(a, b, n);
  }
}

}  // namespace argmaxlab::kernels
