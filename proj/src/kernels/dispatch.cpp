#include "isac/kernels.hpp"

#include <atomic>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace isac::kernels {
namespace {

using detail::KernelTable;

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &detail::scalar_table();
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return &detail::avx2_table();
      }
#endif
      return nullptr;
    case Backend::neon:
#if defined(__aarch64__)
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Backend default_backend() {
  if (table_for(Backend::avx2)) return Backend::avx2;
  if (table_for(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

struct Active {
  std::atomic<Backend> backend{default_backend()};
  std::atomic<const KernelTable*> table{table_for(default_backend())};
};

Active& active() {
  static Active a;
  return a;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) { return table_for(b) != nullptr; }

Backend active_backend() { return active().backend.load(); }

void set_backend(Backend b) {
  const KernelTable* t = table_for(b);
  if (!t) {
    throw std::invalid_argument(std::string("kernel backend unavailable: ") +
                                backend_name(b));
  }
  active().backend.store(b);
  active().table.store(t);
}

void reset_backend() { set_backend(default_backend()); }

std::complex<double> cdot(const std::complex<double>* a,
                          const std::complex<double>* b, std::size_t n) {
  return active().table.load()->cdot(a, b, n);
}

std::complex<double> dotu(const std::complex<double>* a,
                          const std::complex<double>* b, std::size_t n) {
  return active().table.load()->dotu(a, b, n);
}

void axpy(std::complex<double> alpha, const std::complex<double>* x,
          std::complex<double>* y, std::size_t n) {
  active().table.load()->axpy(alpha, x, y, n);
}

double norm2_sq(const std::complex<double>* x, std::size_t n) {
  return active().table.load()->norm2_sq(x, n);
}

double quadform_herm(const std::complex<double>* a_colmajor, std::size_t n,
                     const std::complex<double>* v) {
  // v^H A v = sum_j (v^H col_j) v_j; columns are contiguous.
  const KernelTable* t = active().table.load();
  double re = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::complex<double> cj = t->cdot(v, a_colmajor + j * n, n);
    re += cj.real() * v[j].real() - cj.imag() * v[j].imag();
  }
  return re;
}

}  // namespace isac::kernels
