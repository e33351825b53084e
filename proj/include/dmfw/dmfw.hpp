#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dmfw/constraint.hpp"
#include "dmfw/metrics.hpp"
#include "dmfw/mixing.hpp"
#include "dmfw/objectives.hpp"
#include "dmfw/schedules.hpp"
#include "dmfw/trace.hpp"
#include "dmfw/types.hpp"

namespace dmfw {

struct DmfwOptions {
  StepSchedule schedule = StepSchedule::dmfw_default();
  /// Batch size per agent = max(1, round(batch_fraction * m_i)); 0 forces
  /// single-sample batches.
  double batch_fraction = 0.01;
  /// Initial point, identical across agents; empty means the ball's center.
  VectorXd x1;
  /// Per-agent initial points (n x p); overrides x1 when non-empty.
  MatrixXd x1_per_agent;
  int metric_cadence = 10;
  std::optional<double> fstar;
  bool timing = false;
  /// Metrics objective override; defaults to (1/n) sum of the run's own
  /// objectives. Lets centralized baselines report against the same F.
  const ObjectiveAggregate* metrics_objective = nullptr;
};

/// Synchronized multi-agent loop: one object holds all n agents' states as
/// rows and advances them in lockstep. After construction the state at k = 1
/// is complete (y1 = s1 = sampled gradient at the consensus point, p1 mixed
/// from s1); each advance() performs the Frank-Wolfe update for the current
/// iteration and then the consensus / momentum / tracking phases of the next.
/// All cross-agent reads happen in the three mixing products against
/// snapshots of the previous phase, so trajectories are bitwise reproducible
/// for a fixed seed regardless of worker count.
class DmfwEngine {
 public:
  DmfwEngine(std::vector<const StochasticObjective*> objectives, NormBall<double> set,
             const MixingMatrix<double>& mixing, const DmfwOptions& opts, std::uint64_t seed);

  void advance();
  long k() const { return k_; }
  Index agents() const { return iterates_.rows(); }

  const MatrixXd& iterates() const { return iterates_; }                    // x_k rows
  const MatrixXd& consensus_iterates() const { return consensus_; }         // xhat_k rows
  const MatrixXd& previous_consensus_iterates() const { return consensus_prev_; }
  const MatrixXd& momentum() const { return momentum_; }                    // y_k rows
  const MatrixXd& tracker() const { return tracker_; }                      // s_k rows
  const MatrixXd& tracked_gradient() const { return tracked_; }             // p_k rows
  /// Vertices theta_{k-1} chosen by the most recent advance().
  const MatrixXd& last_vertices() const { return vertices_; }
  double last_eta() const { return last_eta_; }

  VectorXd mean_iterate() const { return iterates_.colwise().mean().transpose(); }
  VectorXd mean_momentum() const { return momentum_.colwise().mean().transpose(); }

  const NormBall<double>& set() const { return set_; }
  const StochasticObjective& objective(Index i) const { return *objectives_[static_cast<size_t>(i)]; }

 private:
  void refresh_phases(long k);  // consensus + momentum + tracking at iteration k

  std::vector<const StochasticObjective*> objectives_;
  NormBall<double> set_;
  MatrixXd weights_;
  StepSchedule schedule_;
  std::vector<std::mt19937_64> rngs_;
  std::vector<Index> batch_sizes_;
  std::vector<Index> batch_;  // scratch

  MatrixXd iterates_, consensus_, consensus_prev_;
  MatrixXd momentum_, tracker_, tracked_, vertices_;
  double last_eta_ = 0;
  long k_ = 1;
};

/// Runs K iterations and returns the recorded trace (empty for K = 0).
/// Deterministic for fixed seed and configuration.
std::vector<TraceRecord> run_dmfw(const std::vector<const StochasticObjective*>& objectives,
                                  const NormBall<double>& set,
                                  const MixingMatrix<double>& mixing, long iters,
                                  std::uint64_t seed, const DmfwOptions& opts = {});

}  // namespace dmfw
