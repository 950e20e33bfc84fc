// Low-level complex-vector kernels with runtime-dispatched SIMD backends.
//
// Every kernel has a scalar reference implementation and, where the target
// CPU supports it, a vectorized variant (AVX2+FMA on x86-64, NEON on
// aarch64). The active backend is chosen once at startup from cpuid and can
// be overridden with set_backend(), which the equivalence tests use to run
// the same inputs through every available backend.

#pragma once

#include <complex>
#include <cstddef>

namespace isac::kernels {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

// True if the backend was compiled in and the running CPU supports it.
bool backend_available(Backend b);

// Currently active backend.
Backend active_backend();

// Force a specific backend. Throws std::invalid_argument if unavailable.
void set_backend(Backend b);

// Restore the default (best available) backend.
void reset_backend();

// sum_i conj(a[i]) * b[i]
std::complex<double> cdot(const std::complex<double>* a,
                          const std::complex<double>* b, std::size_t n);

// sum_i a[i] * b[i]
std::complex<double> dotu(const std::complex<double>* a,
                          const std::complex<double>* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(std::complex<double> alpha, const std::complex<double>* x,
          std::complex<double>* y, std::size_t n);

// sum_i |x[i]|^2
double norm2_sq(const std::complex<double>* x, std::size_t n);

// real(v^H A v) for a Hermitian column-major n-by-n matrix A.
// The imaginary part cancels for Hermitian A and is discarded.
double quadform_herm(const std::complex<double>* a_colmajor, std::size_t n,
                     const std::complex<double>* v);

}  // namespace isac::kernels
