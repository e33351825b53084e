#include "dmfw/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dmfw/metrics.hpp"
#include "dmfw/rng.hpp"

namespace dmfw {

namespace {

Index batch_size_for(double fraction, Index m) {
  const auto want = static_cast<Index>(std::llround(fraction * static_cast<double>(m)));
  return std::clamp<Index>(want, 1, m);
}

TraceRecord centralized_record(long k, const ObjectiveAggregate& agg,
                               const NormBall<double>& set, const VectorXd& x,
                               const VectorXd& direction, std::optional<double> fstar,
                               double elapsed) {
  TraceRecord r;
  r.k = k;
  r.fw_gap = fw_gap(agg, set, x);
  r.subopt = agg.value(x) - fstar.value_or(0.0);
  r.consensus_err = 0.0;  // single worker
  r.tracking_err = (agg.full_gradient(x) - direction).norm();
  r.tracking_err_sq = r.tracking_err * r.tracking_err;
  r.per_agent_dev = 0.0;
  r.elapsed_s = elapsed;
  return r;
}

}  // namespace

SfwEngine::SfwEngine(const StochasticObjective& objective, NormBall<double> set,
                     const SfwOptions& opts, std::uint64_t seed)
    : objective_(objective),
      set_(set),
      gamma_(opts.gamma),
      rho_(opts.rho),
      rng_(make_engine(seed, 1)),
      batch_size_(batch_size_for(opts.batch_fraction, objective.sample_count())) {
  if (objective_.dim() != set_.dim)
    throw std::invalid_argument("sfw: objective dimension != set dimension");
  x_ = opts.x1.size() > 0 ? opts.x1 : VectorXd::Zero(set_.dim);
  if (x_.size() != set_.dim) throw std::invalid_argument("sfw: x1 dimension mismatch");
  if (!membership(set_, x_)) throw std::invalid_argument("sfw: initial point infeasible");
  d_ = VectorXd::Zero(set_.dim);
  // k = 1 update of the averaged gradient happens in the first advance().
  objective_.draw_batch(batch_size_, rng_, batch_);
  const double rho1 = rho_(1);
  d_ = (1.0 - rho1) * d_ + rho1 * objective_.sample_gradient(x_, batch_);
}

void SfwEngine::advance() {
  const VectorXd theta = lmo(set_, d_);
  x_ += gamma_(k_) * (theta - x_);
  ++k_;
  objective_.draw_batch(batch_size_, rng_, batch_);
  const double rho = rho_(k_);
  d_ = (1.0 - rho) * d_ + rho * objective_.sample_gradient(x_, batch_);
  if (!d_.allFinite() || !x_.allFinite())
    throw std::runtime_error("sfw: non-finite state at iteration " + std::to_string(k_));
}

std::vector<TraceRecord> run_sfw(const StochasticObjective& pooled, const NormBall<double>& set,
                                 long iters, std::uint64_t seed, const SfwOptions& opts) {
  std::vector<TraceRecord> trace;
  if (iters <= 0) return trace;
  SfwEngine engine(pooled, set, opts, seed);
  std::optional<ObjectiveAggregate> own;
  const ObjectiveAggregate* agg = opts.metrics_objective;
  if (agg == nullptr) {
    own.emplace(std::vector<const StochasticObjective*>{&pooled});
    agg = &*own;
  }
  const auto t0 = std::chrono::steady_clock::now();
  for (long k = 1; k <= iters; ++k) {
    if (metrics_due(k, iters, opts.metric_cadence)) {
      const double elapsed =
          opts.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                      : 0.0;
      trace.push_back(centralized_record(k, *agg, set, engine.iterate(),
                                         engine.averaged_gradient(), opts.fstar, elapsed));
    }
    engine.advance();
  }
  return trace;
}

std::vector<TraceRecord> run_mshfw(const StochasticObjective& pooled,
                                   const NormBall<double>& set, long iters, std::uint64_t seed,
                                   const DmfwOptions& opts) {
  Graph trivial = make_complete(1);
  const MixingMatrix<double> unit = metropolis_weights(trivial);
  return run_dmfw({&pooled}, set, unit, iters, seed, opts);
}

DefwEngine::DefwEngine(std::vector<const StochasticObjective*> objectives, NormBall<double> set,
                       const MixingMatrix<double>& mixing, const DefwOptions& opts)
    : objectives_(std::move(objectives)), set_(set), step_(opts.step) {
  const auto n = static_cast<Index>(objectives_.size());
  if (n < 1) throw std::invalid_argument("defw: at least one agent required");
  if (mixing.size() != n) throw std::invalid_argument("defw: mixing matrix size != agent count");
  for (const auto* obj : objectives_) {
    if (obj == nullptr) throw std::invalid_argument("defw: null objective");
    if (obj->dim() != set_.dim)
      throw std::invalid_argument("defw: objective dimension != set dimension");
  }
  weights_ = mixing.weights;
  iterates_.resize(n, set_.dim);
  if (opts.x1.size() > 0) {
    if (opts.x1.size() != set_.dim) throw std::invalid_argument("defw: x1 dimension mismatch");
    iterates_.rowwise() = opts.x1.transpose();
  } else {
    iterates_.setZero();
  }
  for (Index i = 0; i < n; ++i)
    if (!membership(set_, iterates_.row(i).transpose()))
      throw std::invalid_argument("defw: initial point infeasible");

  consensus_ = weights_ * iterates_;
  gradients_.resize(n, set_.dim);
  refresh_gradients();
  tracker_ = gradients_;
  tracked_ = weights_ * tracker_;
}

void DefwEngine::refresh_gradients() {
  for (Index i = 0; i < iterates_.rows(); ++i)
    gradients_.row(i) =
        objectives_[static_cast<size_t>(i)]->full_gradient(consensus_.row(i).transpose()).transpose();
}

void DefwEngine::advance() {
  const double step = step_(k_);
  for (Index i = 0; i < iterates_.rows(); ++i) {
    const VectorXd theta = lmo(set_, tracked_.row(i).transpose());
    iterates_.row(i) = consensus_.row(i) + step * (theta.transpose() - consensus_.row(i));
  }
  ++k_;
  consensus_ = weights_ * iterates_;
  const MatrixXd previous = gradients_;
  refresh_gradients();
  tracker_ = weights_ * tracker_ + (gradients_ - previous);
  tracked_ = weights_ * tracker_;
  if (!tracked_.allFinite())
    throw std::runtime_error("defw: non-finite state at iteration " + std::to_string(k_));
}

std::vector<TraceRecord> run_defw(const std::vector<const StochasticObjective*>& objectives,
                                  const NormBall<double>& set,
                                  const MixingMatrix<double>& mixing, long iters,
                                  const DefwOptions& opts) {
  std::vector<TraceRecord> trace;
  if (iters <= 0) return trace;
  DefwEngine engine(objectives, set, mixing, opts);
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
      const VectorXd ybar = engine.local_gradients().colwise().mean().transpose();
      const VectorXd pbar = agg->size() == engine.agents()
                                ? tracked_mean_gradient(*agg, engine.consensus_iterates())
                                : agg->full_gradient(engine.consensus_iterates().row(0).transpose());
      r.tracking_err = (pbar - ybar).norm();
      r.tracking_err_sq = r.tracking_err * r.tracking_err;
      r.per_agent_dev = per_agent_deviation(engine.tracked_gradient(), ybar);
      r.elapsed_s =
          opts.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                      : 0.0;
      trace.push_back(r);
    }
    engine.advance();
  }
  return trace;
}

}  // namespace dmfw
