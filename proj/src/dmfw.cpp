#include "dmfw/dmfw.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dmfw/rng.hpp"

namespace dmfw {

namespace {

Index batch_size_for(double fraction, Index m) {
  const auto want = static_cast<Index>(std::llround(fraction * static_cast<double>(m)));
  return std::clamp<Index>(want, 1, m);
}

}  // namespace

DmfwEngine::DmfwEngine(std::vector<const StochasticObjective*> objectives, NormBall<double> set,
                       const MixingMatrix<double>& mixing, const DmfwOptions& opts,
                       std::uint64_t seed)
    : objectives_(std::move(objectives)), set_(set), schedule_(opts.schedule) {
  const auto n = static_cast<Index>(objectives_.size());
  if (n < 1) throw std::invalid_argument("dmfw: at least one agent required");
  if (mixing.size() != n) throw std::invalid_argument("dmfw: mixing matrix size != agent count");
  const Index p = set_.dim;
  for (const auto* obj : objectives_) {
    if (obj == nullptr) throw std::invalid_argument("dmfw: null objective");
    if (obj->dim() != p) throw std::invalid_argument("dmfw: objective dimension != set dimension");
  }
  weights_ = mixing.weights;

  iterates_.resize(n, p);
  if (opts.x1_per_agent.size() > 0) {
    if (opts.x1_per_agent.rows() != n || opts.x1_per_agent.cols() != p)
      throw std::invalid_argument("dmfw: per-agent initial points must be n x p");
    iterates_ = opts.x1_per_agent;
  } else if (opts.x1.size() > 0) {
    if (opts.x1.size() != p) throw std::invalid_argument("dmfw: x1 dimension mismatch");
    iterates_.rowwise() = opts.x1.transpose();
  } else {
    iterates_.setZero();
  }
  for (Index i = 0; i < n; ++i)
    if (!membership(set_, iterates_.row(i).transpose()))
      throw std::invalid_argument("dmfw: initial point of agent " + std::to_string(i + 1) +
                                  " is infeasible");

  rngs_.reserve(static_cast<size_t>(n));
  batch_sizes_.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    rngs_.push_back(make_engine(seed, static_cast<std::uint64_t>(i) + 1));
    batch_sizes_.push_back(batch_size_for(opts.batch_fraction, objectives_[static_cast<size_t>(i)]->sample_count()));
  }

  // k = 1 is the initialization step: one consensus round on x1, then
  // y1 = s1 = sampled gradient at xhat1 and p1 mixed from s1. The momentum
  // and tracking recursions start at k = 2.
  consensus_ = weights_ * iterates_;
  consensus_prev_ = consensus_;
  momentum_.resize(n, p);
  for (Index i = 0; i < n; ++i) {
    const auto& obj = *objectives_[static_cast<size_t>(i)];
    obj.draw_batch(batch_sizes_[static_cast<size_t>(i)], rngs_[static_cast<size_t>(i)], batch_);
    momentum_.row(i) = obj.sample_gradient(consensus_.row(i).transpose(), batch_).transpose();
  }
  tracker_ = momentum_;
  tracked_ = weights_ * tracker_;
  vertices_ = MatrixXd::Zero(n, p);
}

void DmfwEngine::refresh_phases(long k) {
  consensus_prev_ = consensus_;
  consensus_ = weights_ * iterates_;  // Average consensus

  // Momentum update: the fresh sample is evaluated at both the current and
  // the previous consensus point.
  const double gamma = schedule_.gamma(k);
  const Index n = iterates_.rows();
  MatrixXd momentum_next(n, iterates_.cols());
  for (Index i = 0; i < n; ++i) {
    const auto& obj = *objectives_[static_cast<size_t>(i)];
    obj.draw_batch(batch_sizes_[static_cast<size_t>(i)], rngs_[static_cast<size_t>(i)], batch_);
    const VectorXd g_now = obj.sample_gradient(consensus_.row(i).transpose(), batch_);
    const VectorXd g_prev = obj.sample_gradient(consensus_prev_.row(i).transpose(), batch_);
    momentum_next.row(i) =
        ((1.0 - gamma) * momentum_.row(i).transpose() + g_now - (1.0 - gamma) * g_prev)
            .transpose();
  }

  // Gradient tracking: two mixing rounds, one over s_{k-1} and one over s_k.
  tracker_ = weights_ * tracker_ + (momentum_next - momentum_);
  tracked_ = weights_ * tracker_;
  momentum_ = std::move(momentum_next);

  if (!momentum_.allFinite() || !tracked_.allFinite())
    throw std::runtime_error("dmfw: non-finite state at iteration " + std::to_string(k));
}

void DmfwEngine::advance() {
  // Frank-Wolfe step of the current iteration.
  last_eta_ = schedule_.eta(k_);
  for (Index i = 0; i < iterates_.rows(); ++i)
    vertices_.row(i) = lmo(set_, tracked_.row(i).transpose()).transpose();
  iterates_ = consensus_ + last_eta_ * (vertices_ - consensus_);

  ++k_;
  refresh_phases(k_);
}

std::vector<TraceRecord> run_dmfw(const std::vector<const StochasticObjective*>& objectives,
                                  const NormBall<double>& set,
                                  const MixingMatrix<double>& mixing, long iters,
                                  std::uint64_t seed, const DmfwOptions& opts) {
  std::vector<TraceRecord> trace;
  if (iters <= 0) return trace;

  DmfwEngine engine(objectives, set, mixing, opts, seed);
  std::optional<ObjectiveAggregate> own;
  const ObjectiveAggregate* agg = opts.metrics_objective;
  if (agg == nullptr) {
    own.emplace(objectives);
    agg = &*own;
  }

  const auto t0 = std::chrono::steady_clock::now();
  for (long k = 1; k <= iters; ++k) {
    if (metrics_due(k, iters, opts.metric_cadence)) {
      TraceRecord r;
      r.k = k;
      const VectorXd xbar = engine.mean_iterate();
      r.fw_gap = fw_gap(*agg, set, xbar);
      r.subopt = agg->value(xbar) - opts.fstar.value_or(0.0);
      r.consensus_err = consensus_error(engine.consensus_iterates(), xbar);
      const VectorXd ybar = engine.mean_momentum();
      // A metrics override with a different agent split only makes sense for
      // a centralized (n = 1) run, where Pbar is just the exact gradient.
      const VectorXd pbar =
          agg->size() == engine.agents()
              ? tracked_mean_gradient(*agg, engine.consensus_iterates())
              : (engine.agents() == 1
                     ? agg->full_gradient(engine.consensus_iterates().row(0).transpose())
                     : throw std::invalid_argument(
                           "run_dmfw: metrics objective split incompatible with agent count"));
      r.tracking_err = (pbar - ybar).norm();
      r.tracking_err_sq = r.tracking_err * r.tracking_err;
      r.per_agent_dev = per_agent_deviation(engine.tracked_gradient(), ybar);
      r.elapsed_s = opts.timing
                        ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                        : 0.0;
      trace.push_back(r);
    }
    engine.advance();
  }
  return trace;
}

}  // namespace dmfw
