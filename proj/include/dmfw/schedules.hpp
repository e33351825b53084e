#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace dmfw {

/// Per-iteration step sizes, k >= 1. Defaults are the convergence-rate
/// choices gamma_k = 2/(k+1) (momentum) and eta_k = 2/(k+2) (Frank-Wolfe
/// combination); both lie in (0, 1] for all k >= 1.
struct StepSchedule {
  std::function<double(long)> gamma;
  std::function<double(long)> eta;

  static StepSchedule dmfw_default() {
    return {[](long k) { return 2.0 / static_cast<double>(k + 1); },
            [](long k) { return 2.0 / static_cast<double>(k + 2); }};
  }

  /// gamma == 1 collapses the momentum estimate to the fresh sampled
  /// gradient; with a full batch this turns the loop into deterministic
  /// gradient tracking.
  static StepSchedule unit_momentum(std::function<double(long)> eta_fn) {
    return {[](long) { return 1.0; }, std::move(eta_fn)};
  }
};

inline double sfw_gamma(long k) { return 2.0 / static_cast<double>(k + 8); }
inline double sfw_rho(long k) { return 4.0 / std::pow(static_cast<double>(k + 8), 2.0 / 3.0); }

inline double defw_step_convex(long k) { return 2.0 / static_cast<double>(k + 1); }
inline double defw_step_nonconvex(long k) { return 1.0 / std::sqrt(static_cast<double>(k)); }

}  // namespace dmfw
