// AVX2+FMA kernels for interleaved complex<double> arrays.
//
// A __m256d holds two complex values [re0, im0, re1, im1]. Dot products keep
// two lane-wise accumulators:
//   p += a * b            -> lanes [ar*br, ai*bi, ...]
//   q += swap(a) * b      -> lanes [ai*br, ar*bi, ...]
// and recombine at the end:
//   conj(a).b : re = sum(p),            im = odd(q) - even(q)
//   a.b       : re = even(p) - odd(p),  im = sum(q)
// This file is compiled with -mavx2 -mfma; callers reach it only after the
// cpuid check in the dispatcher.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace isac::kernels::detail {
namespace {

inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0x5); }

inline double sum_all(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// (even-lane sum, odd-lane sum)
inline void sum_even_odd(__m256d v, double& even, double& odd) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  even = _mm_cvtsd_f64(s);
  odd = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

struct DotAcc {
  __m256d p0 = _mm256_setzero_pd();
  __m256d p1 = _mm256_setzero_pd();
  __m256d q0 = _mm256_setzero_pd();
  __m256d q1 = _mm256_setzero_pd();

  std::size_t run(const std::complex<double>* a, const std::complex<double>* b,
                  std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      __m256d va0 = _mm256_loadu_pd(pa + 2 * i);
      __m256d vb0 = _mm256_loadu_pd(pb + 2 * i);
      __m256d va1 = _mm256_loadu_pd(pa + 2 * i + 4);
      __m256d vb1 = _mm256_loadu_pd(pb + 2 * i + 4);
      p0 = _mm256_fmadd_pd(va0, vb0, p0);
      q0 = _mm256_fmadd_pd(swap_re_im(va0), vb0, q0);
      p1 = _mm256_fmadd_pd(va1, vb1, p1);
      q1 = _mm256_fmadd_pd(swap_re_im(va1), vb1, q1);
    }
    if (i + 2 <= n) {
      __m256d va = _mm256_loadu_pd(pa + 2 * i);
      __m256d vb = _mm256_loadu_pd(pb + 2 * i);
      p0 = _mm256_fmadd_pd(va, vb, p0);
      q0 = _mm256_fmadd_pd(swap_re_im(va), vb, q0);
      i += 2;
    }
    return i;
  }
};

std::complex<double> avx2_cdot(const std::complex<double>* a,
                               const std::complex<double>* b, std::size_t n) {
  DotAcc acc;
  std::size_t i = acc.run(a, b, n);
  double qe, qo;
  sum_even_odd(_mm256_add_pd(acc.q0, acc.q1), qe, qo);
  double re = sum_all(_mm256_add_pd(acc.p0, acc.p1));
  double im = qo - qe;
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

std::complex<double> avx2_dotu(const std::complex<double>* a,
                               const std::complex<double>* b, std::size_t n) {
  DotAcc acc;
  std::size_t i = acc.run(a, b, n);
  double pe, po;
  sum_even_odd(_mm256_add_pd(acc.p0, acc.p1), pe, po);
  double re = pe - po;
  double im = sum_all(_mm256_add_pd(acc.q0, acc.q1));
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br - ai * bi;
    im += ar * bi + ai * br;
  }
  return {re, im};
}

void avx2_axpy(std::complex<double> alpha, const std::complex<double>* x,
               std::complex<double>* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d are = _mm256_set1_pd(alpha.real());
  const __m256d aim = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    __m256d prod =
        _mm256_addsub_pd(_mm256_mul_pd(vx, are),
                         _mm256_mul_pd(swap_re_im(vx), aim));
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, prod));
  }
  const double cr = alpha.real(), ci = alpha.imag();
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += std::complex<double>(cr * xr - ci * xi, cr * xi + ci * xr);
  }
}

double avx2_norm2_sq(const std::complex<double>* x, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v0 = _mm256_loadu_pd(px + 2 * i);
    __m256d v1 = _mm256_loadu_pd(px + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  if (i + 2 <= n) {
    __m256d v = _mm256_loadu_pd(px + 2 * i);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
    i += 2;
  }
  double acc = sum_all(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return acc;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{avx2_cdot, avx2_dotu, avx2_axpy, avx2_norm2_sq};
  return t;
}

}  // namespace isac::kernels::detail

#endif  // x86-64
