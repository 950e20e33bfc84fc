// NEON kernels for aarch64. A float64x2_t holds one complex value [re, im];
// the loops process two complex values per iteration with independent
// accumulators. Same lane-recombination scheme as the AVX2 backend.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace isac::kernels::detail {
namespace {

inline float64x2_t swap_re_im(float64x2_t v) { return vextq_f64(v, v, 1); }

std::complex<double> neon_cdot(const std::complex<double>* a,
                               const std::complex<double>* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  float64x2_t p0 = vdupq_n_f64(0.0), p1 = vdupq_n_f64(0.0);
  float64x2_t q0 = vdupq_n_f64(0.0), q1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t va0 = vld1q_f64(pa + 2 * i);
    float64x2_t vb0 = vld1q_f64(pb + 2 * i);
    float64x2_t va1 = vld1q_f64(pa + 2 * i + 2);
    float64x2_t vb1 = vld1q_f64(pb + 2 * i + 2);
    p0 = vfmaq_f64(p0, va0, vb0);
    q0 = vfmaq_f64(q0, swap_re_im(va0), vb0);
    p1 = vfmaq_f64(p1, va1, vb1);
    q1 = vfmaq_f64(q1, swap_re_im(va1), vb1);
  }
  float64x2_t p = vaddq_f64(p0, p1);
  float64x2_t q = vaddq_f64(q0, q1);
  double re = vaddvq_f64(p);
  double im = vgetq_lane_f64(q, 1) - vgetq_lane_f64(q, 0);
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

std::complex<double> neon_dotu(const std::complex<double>* a,
                               const std::complex<double>* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  float64x2_t p0 = vdupq_n_f64(0.0), p1 = vdupq_n_f64(0.0);
  float64x2_t q0 = vdupq_n_f64(0.0), q1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t va0 = vld1q_f64(pa + 2 * i);
    float64x2_t vb0 = vld1q_f64(pb + 2 * i);
    float64x2_t va1 = vld1q_f64(pa + 2 * i + 2);
    float64x2_t vb1 = vld1q_f64(pb + 2 * i + 2);
    p0 = vfmaq_f64(p0, va0, vb0);
    q0 = vfmaq_f64(q0, swap_re_im(va0), vb0);
    p1 = vfmaq_f64(p1, va1, vb1);
    q1 = vfmaq_f64(q1, swap_re_im(va1), vb1);
  }
  float64x2_t p = vaddq_f64(p0, p1);
  float64x2_t q = vaddq_f64(q0, q1);
  double re = vgetq_lane_f64(p, 0) - vgetq_lane_f64(p, 1);
  double im = vaddvq_f64(q);
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br - ai * bi;
    im += ar * bi + ai * br;
  }
  return {re, im};
}

void neon_axpy(std::complex<double> alpha, const std::complex<double>* x,
               std::complex<double>* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const float64x2_t cre = vdupq_n_f64(alpha.real());
  const float64x2_t cim = vdupq_n_f64(alpha.imag());
  const float64x2_t sign = {-1.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    float64x2_t vx = vld1q_f64(px + 2 * i);
    float64x2_t vy = vld1q_f64(py + 2 * i);
    float64x2_t t = vmulq_f64(vx, cre);
    t = vfmaq_f64(t, vmulq_f64(swap_re_im(vx), cim), sign);
    vst1q_f64(py + 2 * i, vaddq_f64(vy, t));
  }
}

double neon_norm2_sq(const std::complex<double>* x, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v0 = vld1q_f64(px + 2 * i);
    float64x2_t v1 = vld1q_f64(px + 2 * i + 2);
    acc0 = vfmaq_f64(acc0, v0, v0);
    acc1 = vfmaq_f64(acc1, v1, v1);
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return acc;
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable t{neon_cdot, neon_dotu, neon_axpy, neon_norm2_sq};
  return t;
}

}  // namespace isac::kernels::detail

#endif  // aarch64
