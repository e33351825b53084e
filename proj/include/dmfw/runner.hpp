#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmfw/config.hpp"
#include "dmfw/graph.hpp"
#include "dmfw/metrics.hpp"
#include "dmfw/mixing.hpp"
#include "dmfw/objectives.hpp"
#include "dmfw/trace.hpp"

namespace dmfw {

/// Everything a configuration resolves to before any algorithm runs:
/// topology, constraint set, per-agent objectives, the pooled objective the
/// centralized baselines sample from, the shared metrics aggregate, and the
/// reference optimum for convex instances.
struct ExperimentSetup {
  Graph graph;
  MixingMatrix<double> mixing;
  NormBall<double> ball{};
  std::vector<StochasticObjective> locals;
  std::unique_ptr<StochasticObjective> pooled;
  std::unique_ptr<ObjectiveAggregate> aggregate;
  std::optional<ReferenceOptimum> reference;
  std::string dataset_hash{"-"};
};

ExperimentSetup build_setup(const RunnerConfig& cfg);

/// Executes one trace for (algorithm, seed) against a prepared setup.
std::vector<TraceRecord> execute_run(const ExperimentSetup& setup, const RunnerConfig& cfg,
                                     const std::string& algorithm, long seed);

/// Full experiment: manifest, one CSV per (algorithm, seed), summary.csv,
/// rates.csv, optional SVG plots and bound diagnostics. Runs are distributed
/// over worker threads capped by DMFW_THREADS; each run is internally
/// deterministic, so the outputs do not depend on the worker count.
void run_experiments(const RunnerConfig& cfg, std::ostream& log, bool dry_run = false);

/// Seed-averaged summary over existing trace files named <algo>_seed<k>.csv.
void summarize_directory(const std::string& outdir, long fit_lo, long fit_hi, std::ostream& log);

/// Worker cap: DMFW_THREADS when set, hardware concurrency otherwise.
int worker_count();

}  // namespace dmfw
