#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmfw/constraint.hpp"

namespace dmfw {

/// Resolved experiment configuration. One manifest line per field; the
/// manifest written by a run is itself a valid config file, so a run can be
/// reproduced with `--config <outdir>/manifest.cfg`.
struct RunnerConfig {
  std::vector<std::string> algorithms{"dmfw"};
  std::string topology{"ring"};  // ring | complete | random:<p> | file:<path>
  int agents{5};
  std::string dataset{};
  std::string objective{"logistic"};  // logistic | sigmoid-nc | ridge
  std::string constraint{"l2:5"};     // <q>:<radius>, q may be rational like 5/4
  long iters{2000};
  double batch_frac{0.01};
  std::vector<long> seeds{1};
  std::string outdir{"out"};
  // The CLI records every iteration by default (one CSV row per k); pass a
  // larger cadence to thin the costly full-gradient metrics beyond k = 100.
  int metric_cadence{1};
  bool feature_scaling{false};  // per-feature max-abs scaling at load time
  bool plot{false};
  bool timing{true};
  bool bounds{false};
  long subsample{0};  // 0 = all rows
  std::uint64_t data_seed{20240101};
  bool shuffle{true};
  double lambda1{5e-6};
  long ridge_dim{50};
  long ridge_samples{10000};
  long fstar_budget{50000};
};

/// "7", "1..20" or "1,4,9".
std::vector<long> parse_seed_spec(const std::string& spec);
std::string format_seed_list(const std::vector<long>& seeds);

/// "<q>:<r>" with optional leading 'l' on q; q accepts integers, decimals and
/// rationals ("5/4"). The ball's dimension is filled in by the runner.
void parse_constraint_spec(const std::string& spec, double& q, double& radius);

/// Applies one `key = value` setting; unknown keys throw, `meta.*` keys are
/// ignored (manifest annotations).
void apply_config_entry(RunnerConfig& cfg, const std::string& key, const std::string& value);

/// `key = value` lines with `#` comments.
RunnerConfig load_config_file(const std::string& path, RunnerConfig base = {});

/// Manifest body: every config value, normalized, parseable by
/// load_config_file.
std::string serialize_config(const RunnerConfig& cfg);

void validate(const RunnerConfig& cfg);

}  // namespace dmfw
