#include "dmfw/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dmfw/rng.hpp"

namespace dmfw {

namespace {

double softplus(double t) {  // ln(1 + e^t) without overflow
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double sparse_dot(const SparseRow& row, const VectorXd& x) {
  double z = 0;
  for (const auto& [idx, val] : row.entries) z += val * x[idx - 1];
  return z;
}

void sparse_axpy(double coef, const SparseRow& row, VectorXd& g) {
  for (const auto& [idx, val] : row.entries) g[idx - 1] += coef * val;
}

}  // namespace

StochasticObjective StochasticObjective::classification(LossKind kind,
                                                        std::vector<SparseRow> samples,
                                                        Index dim, double lambda1) {
  if (kind == LossKind::ridge)
    throw std::invalid_argument("objective: ridge instances come from ridge_synthetic");
  if (dim < 1) throw std::invalid_argument("objective: dimension must be >= 1");
  if (samples.empty()) throw std::invalid_argument("objective: empty sample set");
  for (const auto& row : samples) {
    if (row.label != 1.0 && row.label != -1.0)
      throw std::invalid_argument("objective: classification labels must be +-1");
    if (!row.entries.empty() && row.entries.back().first > dim)
      throw std::invalid_argument("objective: feature index exceeds dimension");
  }
  StochasticObjective obj;
  obj.kind_ = kind;
  obj.lambda1_ = lambda1;
  obj.dim_ = dim;
  obj.samples_ = std::move(samples);
  return obj;
}

StochasticObjective StochasticObjective::regression(std::vector<SparseRow> samples, Index dim,
                                                    double lambda1) {
  if (dim < 1) throw std::invalid_argument("objective: dimension must be >= 1");
  if (samples.empty()) throw std::invalid_argument("objective: empty sample set");
  StochasticObjective obj;
  obj.kind_ = LossKind::ridge;
  obj.lambda1_ = lambda1;
  obj.dim_ = dim;
  obj.samples_ = std::move(samples);
  return obj;
}

StochasticObjective StochasticObjective::ridge_synthetic(Index dim, Index samples,
                                                         double lambda1, std::uint64_t seed,
                                                         double noise_std) {
  if (dim < 1 || samples < 1)
    throw std::invalid_argument("ridge_synthetic: dim and sample count must be >= 1");
  auto rng = make_engine(seed, 0x72696467);
  std::uniform_real_distribution<double> feat(0.3, 0.4);
  std::uniform_real_distribution<double> target(0.0, 10.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  StochasticObjective obj;
  obj.kind_ = LossKind::ridge;
  obj.lambda1_ = lambda1;
  obj.dim_ = dim;
  obj.ridge_target_ = VectorXd(dim);
  for (Index j = 0; j < dim; ++j) obj.ridge_target_[j] = target(rng);
  obj.samples_.reserve(static_cast<size_t>(samples));
  for (Index s = 0; s < samples; ++s) {
    SparseRow row;
    row.entries.reserve(static_cast<size_t>(dim));
    double z = 0;
    for (Index j = 0; j < dim; ++j) {
      const double a = feat(rng);
      row.entries.emplace_back(static_cast<int>(j + 1), a);
      z += a * obj.ridge_target_[j];
    }
    row.label = z + (noise_std > 0 ? noise_std * noise(rng) : 0.0);
    obj.samples_.push_back(std::move(row));
  }
  return obj;
}

const VectorXd& StochasticObjective::ridge_target() const {
  if (kind_ != LossKind::ridge || ridge_target_.size() == 0)
    throw std::logic_error("objective: no hidden target attached to this instance");
  return ridge_target_;
}

double StochasticObjective::sample_value(const VectorXd& x, Index sample) const {
  const auto& row = samples_[static_cast<size_t>(sample)];
  const double z = sparse_dot(row, x);
  switch (kind_) {
    case LossKind::logistic:
      return softplus(-row.label * z);
    case LossKind::sigmoid_nc:
      return sigmoid(-row.label * z);
    case LossKind::ridge: {
      const double r = z - row.label;
      return r * r;
    }
  }
  return 0;
}

double StochasticObjective::value(const VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("objective: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("objective: non-finite point");
  double sum = 0;
  for (Index s = 0; s < sample_count(); ++s) sum += sample_value(x, s);
  double v = sum / static_cast<double>(sample_count());
  if (kind_ != LossKind::logistic) v += lambda1_ * x.squaredNorm();
  return v;
}

void StochasticObjective::accumulate_sample_gradient(const VectorXd& x, Index sample,
                                                     VectorXd& g) const {
  const auto& row = samples_[static_cast<size_t>(sample)];
  const double z = sparse_dot(row, x);
  switch (kind_) {
    case LossKind::logistic:
      sparse_axpy(-row.label * sigmoid(-row.label * z), row, g);
      break;
    case LossKind::sigmoid_nc: {
      const double s = sigmoid(row.label * z);
      sparse_axpy(-row.label * s * (1.0 - s), row, g);
      break;
    }
    case LossKind::ridge:
      sparse_axpy(2.0 * (z - row.label), row, g);
      break;
  }
}

VectorXd StochasticObjective::full_gradient(const VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("objective: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("objective: non-finite point");
  VectorXd g = VectorXd::Zero(dim_);
  for (Index s = 0; s < sample_count(); ++s) accumulate_sample_gradient(x, s, g);
  g /= static_cast<double>(sample_count());
  if (kind_ != LossKind::logistic) g += 2.0 * lambda1_ * x;
  return g;
}

VectorXd StochasticObjective::sample_gradient(const VectorXd& x,
                                              std::span<const Index> batch) const {
  if (batch.empty()) throw std::invalid_argument("sample_gradient: empty batch");
  if (x.size() != dim_) throw std::invalid_argument("objective: dimension mismatch");
  VectorXd g = VectorXd::Zero(dim_);
  for (const Index s : batch) {
    if (s < 0 || s >= sample_count())
      throw std::invalid_argument("sample_gradient: index outside local sample range");
    accumulate_sample_gradient(x, s, g);
  }
  g /= static_cast<double>(batch.size());
  if (kind_ != LossKind::logistic) g += 2.0 * lambda1_ * x;
  return g;
}

void StochasticObjective::draw_batch(Index count, std::mt19937_64& rng,
                                     std::vector<Index>& out) const {
  if (count < 1 || count > sample_count())
    throw std::invalid_argument("draw_batch: count outside [1, m_i]");
  out.clear();
  // std::sample keeps ascending order, which fixes the reduction order of the
  // batch average independently of thread count.
  std::vector<Index> all(static_cast<size_t>(sample_count()));
  std::iota(all.begin(), all.end(), Index{0});
  std::sample(all.begin(), all.end(), std::back_inserter(out), count, rng);
}

VectorXd StochasticObjective::sample_gradient(const VectorXd& x, Index count,
                                              std::mt19937_64& rng) const {
  std::vector<Index> batch;
  draw_batch(count, rng, batch);
  return sample_gradient(x, std::span<const Index>(batch));
}

ObjectiveAggregate::ObjectiveAggregate(std::vector<const StochasticObjective*> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("aggregate: no objectives");
  for (const auto* p : parts_) {
    if (p == nullptr) throw std::invalid_argument("aggregate: null objective");
    if (p->dim() != parts_.front()->dim())
      throw std::invalid_argument("aggregate: objective dimensions differ");
  }
}

double ObjectiveAggregate::value(const VectorXd& x) const {
  double sum = 0;
  for (const auto* p : parts_) sum += p->value(x);
  return sum / static_cast<double>(parts_.size());
}

VectorXd ObjectiveAggregate::full_gradient(const VectorXd& x) const {
  VectorXd g = VectorXd::Zero(dim());
  for (const auto* p : parts_) g += p->full_gradient(x);
  return g / static_cast<double>(parts_.size());
}

Index ObjectiveAggregate::dim() const { return parts_.front()->dim(); }

bool ObjectiveAggregate::convex() const {
  return std::all_of(parts_.begin(), parts_.end(),
                     [](const StochasticObjective* p) { return p->convex(); });
}

}  // namespace dmfw
