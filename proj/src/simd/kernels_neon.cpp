#include "momopt/simd/kernels.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#define MOMOPT_HAVE_NEON_KERNELS 1
#include <arm_neon.h>
#endif

namespace momopt::simd::neon {

#ifdef MOMOPT_HAVE_NEON_KERNELS

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) {
    double v = x[i] < 0 ? -x[i] : x[i];
    r = v > r ? v : r;
  }
  return r;
}

double sum_squares(const double* x, std::size_t n) { return dot(x, x, n); }

#else

double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }
double max_abs(const double* x, std::size_t n) { return scalar::max_abs(x, n); }
double sum_squares(const double* x, std::size_t n) { return scalar::sum_squares(x, n); }

#endif

}  // namespace momopt::simd::neon
