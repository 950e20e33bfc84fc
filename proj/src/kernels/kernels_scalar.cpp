// Scalar reference kernels. These define the semantics the SIMD backends
// must reproduce (up to floating-point reassociation).

#include "kernels_impl.hpp"

namespace isac::kernels::detail {
namespace {

std::complex<double> scalar_cdot(const std::complex<double>* a,
                                 const std::complex<double>* b,
                                 std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

std::complex<double> scalar_dotu(const std::complex<double>* a,
                                 const std::complex<double>* b,
                                 std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br - ai * bi;
    im += ar * bi + ai * br;
  }
  return {re, im};
}

void scalar_axpy(std::complex<double> alpha, const std::complex<double>* x,
                 std::complex<double>* y, std::size_t n) {
  const double cr = alpha.real(), ci = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += std::complex<double>(cr * xr - ci * xi, cr * xi + ci * xr);
  }
}

double scalar_norm2_sq(const std::complex<double>* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{scalar_cdot, scalar_dotu, scalar_axpy,
                             scalar_norm2_sq};
  return t;
}

}  // namespace isac::kernels::detail
