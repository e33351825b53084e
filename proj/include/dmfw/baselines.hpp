#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "dmfw/constraint.hpp"
#include "dmfw/dmfw.hpp"
#include "dmfw/mixing.hpp"
#include "dmfw/objectives.hpp"
#include "dmfw/schedules.hpp"
#include "dmfw/trace.hpp"

namespace dmfw {

// Comparison algorithms of the numerical tests. The update recursions come
// from the works the step sizes were published for: SFW from Mokhtari et al.
// (JMLR 2020, averaged stochastic gradient), MSHFW from Akhtar & Rajawat
// (momentum FW, identical to the n = 1 network), DeFW from Wai et al.
// (TAC 2017, deterministic gradient tracking).

struct SfwOptions {
  std::function<double(long)> gamma = sfw_gamma;  // FW combination, 2/(k+8)
  std::function<double(long)> rho = sfw_rho;      // gradient averaging, 4/(k+8)^(2/3)
  double batch_fraction = 0.01;
  VectorXd x1;
  int metric_cadence = 10;
  std::optional<double> fstar;
  bool timing = false;
  const ObjectiveAggregate* metrics_objective = nullptr;
};

/// Centralized stochastic FW with averaged gradient
/// d_k = (1-rho_k) d_{k-1} + rho_k grad f(x_k, xi_k), d_0 = 0.
class SfwEngine {
 public:
  SfwEngine(const StochasticObjective& objective, NormBall<double> set, const SfwOptions& opts,
            std::uint64_t seed);
  void advance();
  long k() const { return k_; }
  const VectorXd& iterate() const { return x_; }
  const VectorXd& averaged_gradient() const { return d_; }

 private:
  const StochasticObjective& objective_;
  NormBall<double> set_;
  std::function<double(long)> gamma_, rho_;
  std::mt19937_64 rng_;
  Index batch_size_;
  std::vector<Index> batch_;
  VectorXd x_, d_;
  long k_ = 1;
};

std::vector<TraceRecord> run_sfw(const StochasticObjective& pooled, const NormBall<double>& set,
                                 long iters, std::uint64_t seed, const SfwOptions& opts = {});

/// MSHFW is exactly the n = 1 degenerate network of the main loop; this runs
/// the same engine over the pooled objective with C = [1].
std::vector<TraceRecord> run_mshfw(const StochasticObjective& pooled,
                                   const NormBall<double>& set, long iters, std::uint64_t seed,
                                   const DmfwOptions& opts = {});

struct DefwOptions {
  std::function<double(long)> step = defw_step_convex;
  VectorXd x1;
  int metric_cadence = 10;
  std::optional<double> fstar;
  bool timing = false;
  const ObjectiveAggregate* metrics_objective = nullptr;
};

/// Decentralized deterministic FW: consensus on iterates plus gradient
/// tracking driven by exact local gradients. No randomness anywhere.
class DefwEngine {
 public:
  DefwEngine(std::vector<const StochasticObjective*> objectives, NormBall<double> set,
             const MixingMatrix<double>& mixing, const DefwOptions& opts);
  void advance();
  long k() const { return k_; }
  Index agents() const { return iterates_.rows(); }
  const MatrixXd& iterates() const { return iterates_; }
  const MatrixXd& consensus_iterates() const { return consensus_; }
  const MatrixXd& local_gradients() const { return gradients_; }
  const MatrixXd& tracker() const { return tracker_; }
  const MatrixXd& tracked_gradient() const { return tracked_; }
  VectorXd mean_iterate() const { return iterates_.colwise().mean().transpose(); }

 private:
  void refresh_gradients();

  std::vector<const StochasticObjective*> objectives_;
  NormBall<double> set_;
  MatrixXd weights_;
  std::function<double(long)> step_;
  MatrixXd iterates_, consensus_, gradients_, tracker_, tracked_;
  long k_ = 1;
};

std::vector<TraceRecord> run_defw(const std::vector<const StochasticObjective*>& objectives,
                                  const NormBall<double>& set,
                                  const MixingMatrix<double>& mixing, long iters,
                                  const DefwOptions& opts = {});

}  // namespace dmfw
