#pragma once

// Shared fixtures: deterministic synthetic classification instances shaped
// like the LIBSVM binary-classification benchmarks (sparse 0/1 features,
// labels from a hidden logistic model with optional label noise).

#include <cstdint>
#include <random>
#include <vector>

#include "dmfw/data.hpp"
#include "dmfw/objectives.hpp"
#include "dmfw/rng.hpp"
#include "dmfw/types.hpp"

namespace dmfw::testsupport {

inline Dataset synth_classification(std::size_t m, int p, double density, double weight_scale,
                                    double flip_prob, std::uint64_t seed) {
  auto rng = make_engine(seed, 0x73796e74);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd w(p);
  for (int j = 0; j < p; ++j) w[j] = weight_scale * gauss(rng);
  Dataset ds;
  ds.dim = p;
  ds.rows.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    SparseRow row;
    double z = 0;
    for (int j = 0; j < p; ++j) {
      if (unif(rng) < density) {
        row.entries.emplace_back(j + 1, 1.0);
        z += w[j];
      }
    }
    const double prob = 1.0 / (1.0 + std::exp(-z));
    row.label = unif(rng) < prob ? 1.0 : -1.0;
    if (flip_prob > 0 && unif(rng) < flip_prob) row.label = -row.label;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

/// The desk-scale stand-in for the 2000-sample a9a subset used by the
/// acceptance runs.
inline Dataset acceptance_instance() {
  return synth_classification(2000, 123, 0.11, 1.0, 0.10, 987654321u);
}

inline std::vector<StochasticObjective> split_objectives(const Dataset& ds, int agents,
                                                         LossKind kind, double lambda1,
                                                         std::uint64_t data_seed,
                                                         bool shuffle = true) {
  const Partition part = partition_even(ds, agents, data_seed, shuffle);
  std::vector<StochasticObjective> out;
  out.reserve(static_cast<size_t>(agents));
  for (int i = 0; i < agents; ++i) {
    Dataset local = gather(ds, part.agents[static_cast<size_t>(i)]);
    out.push_back(StochasticObjective::classification(kind, std::move(local.rows), ds.dim, lambda1));
  }
  return out;
}

inline std::vector<const StochasticObjective*> pointers(
    const std::vector<StochasticObjective>& objs) {
  std::vector<const StochasticObjective*> out;
  for (const auto& o : objs) out.push_back(&o);
  return out;
}

}  // namespace dmfw::testsupport
