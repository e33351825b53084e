#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmfw/constraint.hpp"
#include "dmfw/objectives.hpp"
#include "dmfw/types.hpp"

namespace dmfw {

/// FW-gap g = max_{x in X} <grad F(xbar), xbar - x>, evaluated with the exact
/// full gradient; zero exactly at stationary points, nonnegative for feasible
/// xbar.
double fw_gap(const ObjectiveAggregate& objective, const NormBall<double>& set,
              const VectorXd& xbar);

/// max_i ||xhat_i - xbar|| with xhat agents as rows.
double consensus_error(const MatrixXd& xhat, const VectorXd& xbar);

/// Pbar_k = (1/n) sum_i grad F_i(xhat_i): the unknown exact direction the
/// momentum estimates chase.
VectorXd tracked_mean_gradient(const ObjectiveAggregate& objective, const MatrixXd& xhat);

/// sqrt(sum_i ||p_i - ybar||^2) with tracked gradients p_i as rows.
double per_agent_deviation(const MatrixXd& tracked, const VectorXd& ybar);

struct ReferenceOptimum {
  double value = 0;         // best F seen
  double residual_gap = 0;  // FW-gap at the final iterate; error bar on value
  long iterations = 0;
};

/// F* by deterministic full-gradient Frank-Wolfe with step 2/(k+2). Refuses
/// nonconvex objectives (suboptimality is undefined there; use fw_gap).
ReferenceOptimum reference_optimum(const ObjectiveAggregate& objective,
                                   const NormBall<double>& set, long budget = 50000);

/// Least-squares slope of log(value) against log(k). Requires >= 10 points
/// and positive values.
double fit_loglog_slope(std::span<const double> ks, std::span<const double> values);

struct InvLog2Fit {
  double intercept = 0;
  double coeff = 0;  // value ~ intercept + coeff / log2(k)
  double r2 = 0;
};

InvLog2Fit fit_inverse_log2(std::span<const double> ks, std::span<const double> values);

/// Numeric partial sum sum_{k=1..K} 2/(k+2)^1.5 (the beta constant of the
/// nonconvex rate, which has no closed form).
double beta_partial_sum(long K);

/// Empirical stand-ins for the analysis constants. L_hat from gradient
/// differences over sampled feasible pairs; delta_hat / G_hat from sampled
/// gradient residuals and magnitudes, maximized over agents.
struct EmpiricalConstants {
  double L_hat = 0;
  double delta_hat = 0;
  double G_hat = 0;
};

EmpiricalConstants estimate_constants(const ObjectiveAggregate& objective,
                                      const NormBall<double>& set, std::uint64_t seed,
                                      int pairs = 200, int draws_per_agent = 200);

/// The per-iteration bound constants, from exact inputs (D, n, k0) and the
/// empirical estimates. C4 needs the initial suboptimality; it is NaN when
/// that is unavailable.
struct BoundConstants {
  double C1 = 0;
  double C2 = 0;
  double C3 = 0;
  double C4 = 0;
  double psi = 0;
  double psi_hat = 0;
};

struct BoundInputs {
  double diameter = 0;
  int agents = 0;
  int k0 = 1;
  double L_hat = 0;
  double delta_hat = 0;
  double G_hat = 0;
  double max_y1_norm = 0;
  std::optional<double> initial_suboptimality;
};

BoundConstants bound_constants(const BoundInputs& in);

}  // namespace dmfw
