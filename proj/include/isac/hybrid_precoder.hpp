// Hybrid analog/digital factorization of a communication precoder and a
// sensing precoder into a shared RF front end.
//
// Per subcarrier the solver minimizes
//   zeta * ||W_RF W_BB - B_com||_F^2 + (1 - zeta) * ||W_RF W_BB - B_ss U||_F^2
// over the analog matrix W_RF (unit-modulus entries; block-diagonal support
// for the partially connected structure), the digital matrix W_BB, and a
// row-orthonormal rotation U that aligns the sensing target with the
// communication dimensions. Updates alternate: U is an orthogonal Procrustes
// solution, W_BB a least-squares solve (norm-constrained for the partially
// connected structure), and W_RF either one majorize-minimize step (fully
// connected) or per-row phase alignment (partially connected). Each step can
// only lower the objective, so the per-cycle trace is nonincreasing.

#pragma once

#include <cstdint>
#include <vector>

#include "isac/core.hpp"

namespace isac {

enum class HybridStructure { fully_connected, partially_connected };

struct HybridOptions {
  double rel_tol = 1e-6;
  int max_cycles = 200;
  std::uint64_t seed = 1;  // analog phase initialization
  double power_iter_tol = 1e-10;
  int power_iter_max = 1000;
};

struct HybridPrecoder {
  HybridStructure structure = HybridStructure::fully_connected;
  std::vector<CMat> analog;    // [m] n_t x m_t, unit-modulus support
  std::vector<CMat> digital;   // [m] m_t x K
  std::vector<CMat> rotation;  // [m] p_r x K, rows orthonormal
};

struct HybridResult {
  HybridPrecoder precoder;
  std::vector<std::vector<double>> objective_trace;  // per subcarrier
  bool converged = true;
};

// Weighted factorization residual for one subcarrier.
double hybrid_objective(const CMat& analog, const CMat& digital,
                        const CMat& b_com, const CMat& b_ss,
                        const CMat& rotation, double zeta);

// Best row-orthonormal rotation: the outer unitary factors of the SVD of
// B_ss^H (W_RF W_BB), padded to p_r x K. Always row-orthonormal, including
// for rank-deficient input.
CMat update_unitary(const CMat& b_ss, const CMat& analog, const CMat& digital);

// Unconstrained least-squares digital update for the fully connected
// structure (the power normalization is applied once at the end of the
// alternating loop, not here).
CMat update_digital_fc(const CMat& analog, const CMat& b_com, const CMat& b_ss,
                       const CMat& rotation, double zeta);

// One majorize-minimize step for the fully connected analog matrix; every
// entry of the result has unit modulus (arg 0 is taken as 0).
CMat update_analog_fc(const CMat& analog_prev, const CMat& digital,
                      const CMat& b_com, const CMat& b_ss,
                      const CMat& rotation, double zeta,
                      const HybridOptions& opts = {});

// Norm-constrained digital update for the partially connected structure:
// the least-squares direction scaled so ||W_RF W_BB||_F = ||B_com||_F.
CMat update_digital_pc(const CMat& analog, const CMat& b_com, const CMat& b_ss,
                       const CMat& rotation, double zeta);

// Per-row phase alignment for the block-diagonal analog structure. Entry
// (i, j) is nonzero only for j = floor(i / n_g), n_g = n_t / m_t.
CMat update_analog_pc(const CMat& digital, const CMat& b_com, const CMat& b_ss,
                      const CMat& rotation, double zeta);

// Alternating solve across all subcarriers. b_com[m] is n_t x K (the
// communication design), b_ss[m] is n_t x p_r (the sensing design).
HybridResult solve_hybrid(const std::vector<CMat>& b_com,
                          const std::vector<CMat>& b_ss, int m_t,
                          HybridStructure structure, double zeta,
                          const HybridOptions& opts = {});

}  // namespace isac
