// Internal backend tables for the kernel dispatcher.

#pragma once

#include <complex>
#include <cstddef>

namespace isac::kernels::detail {

using cdot_fn = std::complex<double> (*)(const std::complex<double>*,
                                         const std::complex<double>*,
                                         std::size_t);
using axpy_fn = void (*)(std::complex<double>, const std::complex<double>*,
                         std::complex<double>*, std::size_t);
using norm2_fn = double (*)(const std::complex<double>*, std::size_t);

struct KernelTable {
  cdot_fn cdot;
  cdot_fn dotu;
  axpy_fn axpy;
  norm2_fn norm2_sq;
};

const KernelTable& scalar_table();

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

}  // namespace isac::kernels::detail
