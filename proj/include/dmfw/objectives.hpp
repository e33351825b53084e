#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dmfw/data.hpp"
#include "dmfw/types.hpp"

namespace dmfw {

enum class LossKind { logistic, sigmoid_nc, ridge };

/// One agent's local finite-sum objective F_i(x) = (1/m_i) sum_s f(x, sample_s)
/// (+ lambda1 ||x||^2 for the regularized kinds). Immutable after
/// construction; sampled-gradient calls take the caller's seeded engine, so
/// parallel agents never share mutable state. Averaging the per-sample
/// gradient over all m_i samples reproduces full_gradient exactly.
class StochasticObjective {
 public:
  static StochasticObjective classification(LossKind kind, std::vector<SparseRow> samples,
                                            Index dim, double lambda1 = 0.0);

  /// Ridge objective over existing rows (e.g. the pooled union of several
  /// agents' synthetic samples). No hidden target is attached.
  static StochasticObjective regression(std::vector<SparseRow> samples, Index dim,
                                        double lambda1);

  /// Ridge instance of the synthetic regression experiment: features
  /// a ~ Uniform[0.3,0.4]^p, hidden parameter z ~ Uniform[0,10]^p drawn once,
  /// labels b = a^T z + noise with noise ~ Normal(0, noise_std^2).
  static StochasticObjective ridge_synthetic(Index dim, Index samples, double lambda1,
                                             std::uint64_t seed, double noise_std = 1.0);

  double value(const VectorXd& x) const;
  VectorXd full_gradient(const VectorXd& x) const;

  /// Mean per-sample gradient over an explicit batch of local indices.
  VectorXd sample_gradient(const VectorXd& x, std::span<const Index> batch) const;
  /// Draws `count` indices uniformly without replacement, then averages.
  VectorXd sample_gradient(const VectorXd& x, Index count, std::mt19937_64& rng) const;

  /// Fills `out` with a without-replacement uniform batch of local indices.
  void draw_batch(Index count, std::mt19937_64& rng, std::vector<Index>& out) const;

  LossKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  Index sample_count() const { return static_cast<Index>(samples_.size()); }
  double lambda1() const { return lambda1_; }
  bool convex() const { return kind_ != LossKind::sigmoid_nc; }
  const VectorXd& ridge_target() const;
  const std::vector<SparseRow>& samples() const { return samples_; }

 private:
  StochasticObjective() = default;
  void accumulate_sample_gradient(const VectorXd& x, Index sample, VectorXd& g) const;
  double sample_value(const VectorXd& x, Index sample) const;

  LossKind kind_ = LossKind::logistic;
  double lambda1_ = 0.0;
  Index dim_ = 0;
  std::vector<SparseRow> samples_;
  VectorXd ridge_target_;
};

/// The network objective F(x) = (1/n) sum_i F_i(x). Used by the metrics (the
/// FW-gap needs the exact deterministic gradient) and by the reference
/// optimum.
class ObjectiveAggregate {
 public:
  explicit ObjectiveAggregate(std::vector<const StochasticObjective*> parts);

  double value(const VectorXd& x) const;
  VectorXd full_gradient(const VectorXd& x) const;
  Index dim() const;
  bool convex() const;
  Index size() const { return static_cast<Index>(parts_.size()); }
  const StochasticObjective& part(Index i) const { return *parts_[static_cast<size_t>(i)]; }

 private:
  std::vector<const StochasticObjective*> parts_;
};

}  // namespace dmfw
