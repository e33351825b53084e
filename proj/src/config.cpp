#include "dmfw/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dmfw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: expected on/off, got '" + v + "'");
}

long parse_long(const std::string& v) {
  size_t pos = 0;
  const long out = std::stol(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("config: bad integer '" + v + "'");
  return out;
}

double parse_num(const std::string& v) {
  size_t pos = 0;
  const double out = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("config: bad number '" + v + "'");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<long> parse_seed_spec(const std::string& spec) {
  const std::string s = trim(spec);
  if (s.empty()) throw std::invalid_argument("seeds: empty spec");
  std::vector<long> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const long lo = parse_long(trim(s.substr(0, dots)));
    const long hi = parse_long(trim(s.substr(dots + 2)));
    if (hi < lo) throw std::invalid_argument("seeds: descending range");
    for (long v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const auto& tok : split(s, ',')) {
    if (tok.empty()) throw std::invalid_argument("seeds: empty token");
    out.push_back(parse_long(tok));
  }
  return out;
}

std::string format_seed_list(const std::vector<long>& seeds) {
  std::string out;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

void parse_constraint_spec(const std::string& spec, double& q, double& radius) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("constraint: expected <q>:<radius>, got '" + spec + "'");
  std::string qs = trim(spec.substr(0, colon));
  if (!qs.empty() && (qs.front() == 'l' || qs.front() == 'L')) qs.erase(qs.begin());
  if (qs.empty()) throw std::invalid_argument("constraint: missing exponent");
  if (const auto slash = qs.find('/'); slash != std::string::npos) {
    const double num = parse_num(qs.substr(0, slash));
    const double den = parse_num(qs.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("constraint: zero denominator");
    q = num / den;
  } else {
    q = parse_num(qs);
  }
  radius = parse_num(trim(spec.substr(colon + 1)));
  if (!(q >= 1)) throw std::invalid_argument("constraint: q must be >= 1");
  if (!(radius > 0)) throw std::invalid_argument("constraint: radius must be positive");
}

void apply_config_entry(RunnerConfig& cfg, const std::string& key, const std::string& value) {
  if (key.rfind("meta.", 0) == 0) return;  // manifest annotations
  if (key == "algorithm") {
    cfg.algorithms = split(value, ',');
  } else if (key == "topology") {
    cfg.topology = value;
  } else if (key == "agents") {
    cfg.agents = static_cast<int>(parse_long(value));
  } else if (key == "dataset") {
    cfg.dataset = value;
  } else if (key == "objective") {
    cfg.objective = value;
  } else if (key == "constraint") {
    cfg.constraint = value;
  } else if (key == "constraint.q" || key == "constraint.radius") {
    double q = 0, r = 0;
    parse_constraint_spec(cfg.constraint, q, r);
    if (key == "constraint.q") {
      cfg.constraint = value + ":" + fmt(r);
    } else {
      const auto colon = cfg.constraint.find(':');
      cfg.constraint = cfg.constraint.substr(0, colon) + ":" + value;
    }
    parse_constraint_spec(cfg.constraint, q, r);  // validate the combination
  } else if (key == "iters") {
    cfg.iters = parse_long(value);
  } else if (key == "batch_frac") {
    cfg.batch_frac = parse_num(value);
  } else if (key == "seeds") {
    cfg.seeds = parse_seed_spec(value);
  } else if (key == "outdir") {
    cfg.outdir = value;
  } else if (key == "metric_cadence") {
    cfg.metric_cadence = static_cast<int>(parse_long(value));
  } else if (key == "plot") {
    cfg.plot = parse_bool(value);
  } else if (key == "timing") {
    cfg.timing = parse_bool(value);
  } else if (key == "bounds") {
    cfg.bounds = parse_bool(value);
  } else if (key == "subsample") {
    cfg.subsample = parse_long(value);
  } else if (key == "data_seed") {
    cfg.data_seed = static_cast<std::uint64_t>(parse_long(value));
  } else if (key == "shuffle") {
    cfg.shuffle = parse_bool(value);
  } else if (key == "feature_scaling") {
    cfg.feature_scaling = parse_bool(value);
  } else if (key == "lambda1") {
    cfg.lambda1 = parse_num(value);
  } else if (key == "ridge_dim") {
    cfg.ridge_dim = parse_long(value);
  } else if (key == "ridge_samples") {
    cfg.ridge_samples = parse_long(value);
  } else if (key == "fstar_budget") {
    cfg.fstar_budget = parse_long(value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

RunnerConfig load_config_file(const std::string& path, RunnerConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: missing '=' at line " + std::to_string(lineno) + " of " +
                               path);
    try {
      apply_config_entry(base, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::runtime_error("config: line " + std::to_string(lineno) + " of " + path + ": " +
                               e.what());
    }
  }
  return base;
}

std::string serialize_config(const RunnerConfig& cfg) {
  std::ostringstream out;
  auto line = [&](const char* key, const std::string& v) { out << key << " = " << v << '\n'; };
  std::string algos;
  for (size_t i = 0; i < cfg.algorithms.size(); ++i) {
    if (i) algos += ',';
    algos += cfg.algorithms[i];
  }
  line("algorithm", algos);
  line("topology", cfg.topology);
  line("agents", std::to_string(cfg.agents));
  line("dataset", cfg.dataset);
  line("objective", cfg.objective);
  line("constraint", cfg.constraint);
  line("iters", std::to_string(cfg.iters));
  line("batch_frac", fmt(cfg.batch_frac));
  line("seeds", format_seed_list(cfg.seeds));
  line("outdir", cfg.outdir);
  line("metric_cadence", std::to_string(cfg.metric_cadence));
  line("plot", cfg.plot ? "on" : "off");
  line("timing", cfg.timing ? "on" : "off");
  line("bounds", cfg.bounds ? "on" : "off");
  line("subsample", std::to_string(cfg.subsample));
  line("data_seed", std::to_string(cfg.data_seed));
  line("shuffle", cfg.shuffle ? "on" : "off");
  line("feature_scaling", cfg.feature_scaling ? "on" : "off");
  line("lambda1", fmt(cfg.lambda1));
  line("ridge_dim", std::to_string(cfg.ridge_dim));
  line("ridge_samples", std::to_string(cfg.ridge_samples));
  line("fstar_budget", std::to_string(cfg.fstar_budget));
  return out.str();
}

void validate(const RunnerConfig& cfg) {
  if (cfg.algorithms.empty()) throw std::invalid_argument("config: no algorithms selected");
  for (const auto& a : cfg.algorithms)
    if (a != "dmfw" && a != "mshfw" && a != "sfw" && a != "defw")
      throw std::invalid_argument("config: unknown algorithm '" + a + "'");
  if (cfg.objective != "logistic" && cfg.objective != "sigmoid-nc" && cfg.objective != "ridge")
    throw std::invalid_argument("config: unknown objective '" + cfg.objective + "'");
  if (cfg.agents < 1) throw std::invalid_argument("config: agents must be >= 1");
  if (cfg.iters < 0) throw std::invalid_argument("config: iters must be >= 0");
  if (cfg.seeds.empty()) throw std::invalid_argument("config: empty seed list");
  if (cfg.metric_cadence < 1) throw std::invalid_argument("config: metric_cadence must be >= 1");
  if (!(cfg.batch_frac >= 0.0 && cfg.batch_frac <= 1.0))
    throw std::invalid_argument("config: batch_frac must lie in [0, 1]");
  double q = 0, r = 0;
  parse_constraint_spec(cfg.constraint, q, r);
  if (cfg.objective != "ridge" && cfg.dataset.empty())
    throw std::invalid_argument("config: classification objectives need --dataset");
}

}  // namespace dmfw
