// Energy-efficiency-maximizing fully digital precoder design under
// statistical CSI and a total transmit power budget.
//
// The outer loop is classic fractional programming: for a fixed ratio
// estimate eta it maximizes sum_rate - eta * total_power, then refreshes
// eta with the achieved ratio, stopping once the subproblem value drops to
// the outer tolerance. The subproblem alternates closed-form updates of two
// auxiliary sets (one per-(UT, subcarrier) SINR-like multiplier lambda, one
// complex ratio rho) with a joint precoder update that is a regularized MRT
// solve; the power constraint enters through a scalar shift t found by
// bisection on the eigenvalues of the per-subcarrier interference matrix.
// Every update is a global optimum of its block, so the subproblem objective
// is nondecreasing cycle to cycle.

#pragma once

#include <vector>

#include "isac/comms_metrics.hpp"
#include "isac/core.hpp"

namespace isac {

struct SolverOptions {
  double power_budget_w = 1.0;
  double outer_tol = 1e-4;  // absolute, in the objective's units (nats)
  int max_outer = 30;
  double inner_rel_tol = 1e-6;
  int max_inner = 200;
  double bisection_rel_tol = 1e-6;
  int max_bisection_steps = 100;
};

// lambda(k, m): optimal rate multiplier, equal to the statistical-CSI SINR
// of UT k at subcarrier m under the current precoders.
Eigen::MatrixXd update_lambda(const PrecoderSet& precoders,
                              const std::vector<CMat>& responses,
                              const ChannelStats& stats, double noise_pow);

// rho(k, m): optimal quadratic-transform auxiliary,
// sqrt((1+lambda)*g_k) * v_k^H b_k / (g_k * sum_l |v_k^H b_l|^2 + N0).
CMat update_rho(const PrecoderSet& precoders,
                const std::vector<CMat>& responses, const ChannelStats& stats,
                double noise_pow, const Eigen::MatrixXd& lambda);

struct PrecoderUpdate {
  PrecoderSet precoders;
  double t = 0.0;             // power multiplier chosen by the update
  bool bisected = false;      // false when the unconstrained solve fit
  double transmit_power = 0.0;
};

// Closed-form precoder update for fixed auxiliaries and ratio estimate eta.
// Each b_k is a regularized matched filter toward its own response; t = 0 is
// used whenever the unconstrained solution respects the power budget, else t
// is bisected so the transmit power meets the budget. A state with all rho
// zero yields all-zero precoders.
PrecoderUpdate update_precoders(const std::vector<CMat>& responses,
                                const ChannelStats& stats,
                                const Eigen::MatrixXd& lambda, const CMat& rho,
                                double eta, const PowerModel& model,
                                const SolverOptions& opts);

struct DigitalResult {
  PrecoderSet precoders;
  double eta = 0.0;  // achieved upper-bound rate / total power (nats per J)
  bool converged = false;
  int outer_iterations = 0;

  struct OuterPoint {
    double eta;            // ratio estimate used for this subproblem
    double objective;      // subproblem value at the accepted iterate
    double sum_rate_nats;  // unweighted upper-bound sum over (k, m)
    double total_power_w;
    int inner_cycles;
  };
  std::vector<OuterPoint> trace;
  // Subproblem objective after each inner cycle, one vector per outer
  // iteration; nondecreasing within each vector up to round-off.
  std::vector<std::vector<double>> inner_objectives;
};

// Full solve. Starts from power-exhausting matched-filter precoders and a
// zero ratio estimate, or from *warm_start when given (scaled down if it
// exceeds the budget, with the ratio estimate seeded from it).
DigitalResult solve_fully_digital(const std::vector<CMat>& responses,
                                  const ChannelStats& stats, double noise_pow,
                                  const PowerModel& model,
                                  const SolverOptions& opts,
                                  const PrecoderSet* warm_start = nullptr);

}  // namespace isac
