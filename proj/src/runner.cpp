#include "dmfw/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dmfw/baselines.hpp"
#include "dmfw/data.hpp"
#include "dmfw/dmfw.hpp"
#include "dmfw/plot.hpp"
#include "dmfw/rng.hpp"
#include "dmfw/version.hpp"

namespace fs = std::filesystem;

namespace dmfw {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

LossKind loss_kind_of(const std::string& objective) {
  if (objective == "logistic") return LossKind::logistic;
  if (objective == "sigmoid-nc") return LossKind::sigmoid_nc;
  if (objective == "ridge") return LossKind::ridge;
  throw std::invalid_argument("unknown objective '" + objective + "'");
}

Graph build_topology(const RunnerConfig& cfg) {
  const std::string& t = cfg.topology;
  if (t == "ring") return make_ring(cfg.agents);
  if (t == "complete") return make_complete(cfg.agents);
  if (t.rfind("random:", 0) == 0) {
    const double p = std::stod(t.substr(7));
    return make_random_connected(cfg.agents, p, cfg.data_seed);
  }
  if (t.rfind("file:", 0) == 0) return read_edge_list_file(t.substr(5), cfg.agents);
  throw std::invalid_argument("unknown topology '" + t + "'");
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("DMFW_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

ExperimentSetup build_setup(const RunnerConfig& cfg) {
  validate(cfg);
  ExperimentSetup setup;
  setup.graph = build_topology(cfg);
  setup.mixing = metropolis_weights(setup.graph);
  const int n = setup.graph.n;

  double q = 0, radius = 0;
  parse_constraint_spec(cfg.constraint, q, radius);

  const LossKind kind = loss_kind_of(cfg.objective);
  if (kind == LossKind::ridge) {
    setup.ball = norm_ball(q, radius, static_cast<Index>(cfg.ridge_dim));
    std::vector<SparseRow> pooled_rows;
    for (int i = 0; i < n; ++i) {
      setup.locals.push_back(StochasticObjective::ridge_synthetic(
          cfg.ridge_dim, cfg.ridge_samples, cfg.lambda1,
          mix_seed(cfg.data_seed, static_cast<std::uint64_t>(i) + 1)));
      const auto& rows = setup.locals.back().samples();
      pooled_rows.insert(pooled_rows.end(), rows.begin(), rows.end());
    }
    setup.pooled = std::make_unique<StochasticObjective>(
        StochasticObjective::regression(std::move(pooled_rows), cfg.ridge_dim, cfg.lambda1));
  } else {
    Dataset ds = load_libsvm_file(cfg.dataset);
    setup.dataset_hash = hex64(file_fnv1a64(cfg.dataset));
    if (ds.rows.empty()) throw std::runtime_error("dataset: no rows in " + cfg.dataset);
    if (cfg.subsample > 0)
      ds = subsample(ds, static_cast<std::size_t>(cfg.subsample), cfg.data_seed);
    normalize_labels(ds);
    if (cfg.feature_scaling) max_abs_scale(ds);
    const double lambda1 = kind == LossKind::sigmoid_nc ? cfg.lambda1 : 0.0;
    setup.ball = norm_ball(q, radius, static_cast<Index>(ds.dim));
    const Partition part = partition_even(ds, n, cfg.data_seed, cfg.shuffle);
    for (int i = 0; i < n; ++i) {
      Dataset local = gather(ds, part.agents[static_cast<size_t>(i)]);
      setup.locals.push_back(
          StochasticObjective::classification(kind, std::move(local.rows), ds.dim, lambda1));
    }
    setup.pooled = std::make_unique<StochasticObjective>(
        StochasticObjective::classification(kind, std::move(ds.rows), ds.dim, lambda1));
  }

  std::vector<const StochasticObjective*> parts;
  for (const auto& obj : setup.locals) parts.push_back(&obj);
  setup.aggregate = std::make_unique<ObjectiveAggregate>(std::move(parts));

  if (setup.aggregate->convex() && cfg.iters > 0)
    setup.reference = reference_optimum(*setup.aggregate, setup.ball, cfg.fstar_budget);
  return setup;
}

std::vector<TraceRecord> execute_run(const ExperimentSetup& setup, const RunnerConfig& cfg,
                                     const std::string& algorithm, long seed) {
  std::vector<const StochasticObjective*> locals;
  for (const auto& obj : setup.locals) locals.push_back(&obj);
  const std::optional<double> fstar =
      setup.reference ? std::optional<double>(setup.reference->value) : std::nullopt;

  if (algorithm == "dmfw") {
    DmfwOptions opts;
    opts.batch_fraction = cfg.batch_frac;
    opts.metric_cadence = cfg.metric_cadence;
    opts.fstar = fstar;
    opts.timing = cfg.timing;
    return run_dmfw(locals, setup.ball, setup.mixing, cfg.iters,
                    static_cast<std::uint64_t>(seed), opts);
  }
  if (algorithm == "mshfw") {
    DmfwOptions opts;
    opts.batch_fraction = cfg.batch_frac;
    opts.metric_cadence = cfg.metric_cadence;
    opts.fstar = fstar;
    opts.timing = cfg.timing;
    opts.metrics_objective = setup.aggregate.get();
    return run_mshfw(*setup.pooled, setup.ball, cfg.iters, static_cast<std::uint64_t>(seed),
                     opts);
  }
  if (algorithm == "sfw") {
    SfwOptions opts;
    opts.batch_fraction = cfg.batch_frac;
    opts.metric_cadence = cfg.metric_cadence;
    opts.fstar = fstar;
    opts.timing = cfg.timing;
    opts.metrics_objective = setup.aggregate.get();
    return run_sfw(*setup.pooled, setup.ball, cfg.iters, static_cast<std::uint64_t>(seed), opts);
  }
  if (algorithm == "defw") {
    DefwOptions opts;
    opts.step = cfg.objective == "sigmoid-nc" ? defw_step_nonconvex : defw_step_convex;
    opts.metric_cadence = cfg.metric_cadence;
    opts.fstar = fstar;
    opts.timing = cfg.timing;
    return run_defw(locals, setup.ball, setup.mixing, cfg.iters, opts);
  }
  throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
}

namespace {

struct TraceGroup {
  std::string algorithm;
  std::vector<long> seeds;
  std::vector<std::vector<TraceRecord>> traces;
};

constexpr const char* kSummaryColumns[] = {"fw_gap",          "subopt",        "consensus_err",
                                           "tracking_err",    "tracking_err_sq",
                                           "per_agent_dev",   "elapsed_s"};

double column_value(const TraceRecord& r, int c) {
  switch (c) {
    case 0: return r.fw_gap;
    case 1: return r.subopt;
    case 2: return r.consensus_err;
    case 3: return r.tracking_err;
    case 4: return r.tracking_err_sq;
    case 5: return r.per_agent_dev;
    default: return r.elapsed_s;
  }
}

constexpr int kColumnCount = 7;

void check_group_schema(const TraceGroup& g) {
  for (size_t t = 1; t < g.traces.size(); ++t) {
    if (g.traces[t].size() != g.traces[0].size())
      throw std::runtime_error("summary: trace lengths differ within algorithm " + g.algorithm);
    for (size_t r = 0; r < g.traces[t].size(); ++r)
      if (g.traces[t][r].k != g.traces[0][r].k)
        throw std::runtime_error("summary: iteration grids differ within algorithm " +
                                 g.algorithm);
  }
}

void write_summary_csv(const std::string& path, const std::vector<TraceGroup>& groups) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("summary: cannot open " + path);
  out << "algorithm,k";
  for (const auto* col : kSummaryColumns) out << ',' << col << "_mean," << col << "_std";
  out << '\n';
  for (const auto& g : groups) {
    if (g.traces.empty()) continue;
    const size_t rows = g.traces[0].size();
    const auto n = static_cast<double>(g.traces.size());
    for (size_t r = 0; r < rows; ++r) {
      out << g.algorithm << ',' << g.traces[0][r].k;
      for (int c = 0; c < kColumnCount; ++c) {
        double mean = 0;
        for (const auto& t : g.traces) mean += column_value(t[r], c);
        mean /= n;
        double var = 0;
        for (const auto& t : g.traces) {
          const double d = column_value(t[r], c) - mean;
          var += d * d;
        }
        const double sd = g.traces.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        out << ',' << fmt(mean) << ',' << fmt(sd);
      }
      out << '\n';
    }
  }
}

void write_rates_csv(const std::string& path, const std::vector<TraceGroup>& groups, long fit_lo,
                     long fit_hi, std::ostream& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("rates: cannot open " + path);
  out << "algorithm,column,k_min,k_max,points,loglog_slope\n";
  for (const auto& g : groups) {
    if (g.traces.empty()) continue;
    for (const int c : {0, 1, 4, 5}) {  // fw_gap, subopt, tracking_err_sq, per_agent_dev
      std::vector<double> ks, vals;
      for (size_t r = 0; r < g.traces[0].size(); ++r) {
        const long k = g.traces[0][r].k;
        if (k < fit_lo || k > fit_hi) continue;
        double mean = 0;
        for (const auto& t : g.traces) mean += column_value(t[r], c);
        mean /= static_cast<double>(g.traces.size());
        if (!(mean > 0)) continue;
        ks.push_back(static_cast<double>(k));
        vals.push_back(mean);
      }
      std::string slope = "nan";
      if (ks.size() >= 10) slope = fmt(fit_loglog_slope(ks, vals));
      out << g.algorithm << ',' << kSummaryColumns[c] << ',' << fit_lo << ',' << fit_hi << ','
          << ks.size() << ',' << slope << '\n';
      if (c == 0 || c == 1)
        log << "  rate " << g.algorithm << ' ' << kSummaryColumns[c] << " slope = " << slope
            << " over k in [" << fit_lo << ", " << fit_hi << "]\n";
    }
  }
}

void print_final_table(std::ostream& log, const std::vector<TraceGroup>& groups) {
  log << "final iteration, seed-averaged:\n";
  log << "  algorithm        k      fw_gap        subopt\n";
  for (const auto& g : groups) {
    if (g.traces.empty() || g.traces[0].empty()) continue;
    const size_t last = g.traces[0].size() - 1;
    double gap = 0, sub = 0;
    for (const auto& t : g.traces) {
      gap += t[last].fw_gap;
      sub += t[last].subopt;
    }
    gap /= static_cast<double>(g.traces.size());
    sub /= static_cast<double>(g.traces.size());
    char line[160];
    std::snprintf(line, sizeof(line), "  %-10s %7ld  %12.5e  %12.5e\n", g.algorithm.c_str(),
                  g.traces[0][last].k, gap, sub);
    log << line;
  }
}

std::vector<TraceGroup> collect_groups(const std::string& outdir,
                                       const std::vector<std::string>& algo_order) {
  std::map<std::string, TraceGroup> by_algo;
  std::vector<std::pair<std::string, std::pair<std::string, long>>> found;  // path -> (algo, seed)
  for (const auto& entry : fs::directory_iterator(outdir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const auto pos = name.rfind("_seed");
    if (pos == std::string::npos || name.size() < pos + 6) continue;
    if (name.substr(name.size() - 4) != ".csv") continue;
    const std::string algo = name.substr(0, pos);
    const std::string seed_str = name.substr(pos + 5, name.size() - pos - 5 - 4);
    char* end = nullptr;
    const long seed = std::strtol(seed_str.c_str(), &end, 10);
    if (end != seed_str.c_str() + seed_str.size()) continue;
    found.push_back({entry.path().string(), {algo, seed}});
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& [path, tag] : found) {
    auto& g = by_algo[tag.first];
    g.algorithm = tag.first;
    g.seeds.push_back(tag.second);
    g.traces.push_back(read_trace_csv_file(path));
  }
  std::vector<TraceGroup> groups;
  // Preserve the requested algorithm order when known, then anything else.
  for (const auto& a : algo_order) {
    if (auto it = by_algo.find(a); it != by_algo.end()) {
      groups.push_back(std::move(it->second));
      by_algo.erase(it);
    }
  }
  for (auto& [name, g] : by_algo) groups.push_back(std::move(g));
  for (const auto& g : groups) check_group_schema(g);
  return groups;
}

std::vector<MeanTrace> mean_traces(const std::vector<TraceGroup>& groups) {
  std::vector<MeanTrace> out;
  for (const auto& g : groups) {
    if (g.traces.empty()) continue;
    MeanTrace mt;
    mt.algorithm = g.algorithm;
    mt.records = g.traces[0];
    for (size_t r = 0; r < mt.records.size(); ++r) {
      for (int c = 0; c < kColumnCount; ++c) {
        double mean = 0;
        for (const auto& t : g.traces) mean += column_value(t[r], c);
        mean /= static_cast<double>(g.traces.size());
        switch (c) {
          case 0: mt.records[r].fw_gap = mean; break;
          case 1: mt.records[r].subopt = mean; break;
          case 2: mt.records[r].consensus_err = mean; break;
          case 3: mt.records[r].tracking_err = mean; break;
          case 4: mt.records[r].tracking_err_sq = mean; break;
          case 5: mt.records[r].per_agent_dev = mean; break;
          default: mt.records[r].elapsed_s = mean; break;
        }
      }
    }
    out.push_back(std::move(mt));
  }
  return out;
}

void write_manifest(const std::string& path, const RunnerConfig& cfg,
                    const ExperimentSetup& setup, const std::string& bounds_report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("manifest: cannot open " + path);
  out << "# dmfw run manifest; reproducible via --config " << path << '\n';
  out << serialize_config(cfg);
  out << "meta.git_revision = " << kGitRevision << '\n';
  out << "meta.dataset_hash = " << setup.dataset_hash << '\n';
  out << "meta.agents = " << setup.graph.n << '\n';
  out << "meta.edges = " << setup.graph.edges.size() << '\n';
  out << "meta.lambda = " << fmt(setup.mixing.lambda) << '\n';
  out << "meta.k0 = " << setup.mixing.k0 << '\n';
  out << "meta.dim = " << setup.ball.dim << '\n';
  if (setup.reference) {
    out << "meta.fstar = " << fmt(setup.reference->value) << '\n';
    out << "meta.fstar_residual_gap = " << fmt(setup.reference->residual_gap) << '\n';
  } else {
    out << "meta.fstar = nan  # nonconvex objective: subopt column holds raw F(xbar)\n";
  }
  out << bounds_report;
}

std::string bounds_report(const RunnerConfig& cfg, const ExperimentSetup& setup) {
  const auto est = estimate_constants(*setup.aggregate, setup.ball, cfg.data_seed);
  DmfwOptions probe_opts;
  probe_opts.batch_fraction = cfg.batch_frac;
  std::vector<const StochasticObjective*> locals;
  for (const auto& obj : setup.locals) locals.push_back(&obj);
  DmfwEngine probe(locals, setup.ball, setup.mixing, probe_opts,
                   static_cast<std::uint64_t>(cfg.seeds.front()));
  BoundInputs in;
  in.diameter = setup.ball.diameter();
  in.agents = setup.graph.n;
  in.k0 = setup.mixing.k0;
  in.L_hat = est.L_hat;
  in.delta_hat = est.delta_hat;
  in.G_hat = est.G_hat;
  in.max_y1_norm = probe.momentum().rowwise().norm().maxCoeff();
  if (setup.reference)
    in.initial_suboptimality =
        setup.aggregate->value(probe.mean_iterate()) - setup.reference->value;
  const auto c = bound_constants(in);
  std::ostringstream out;
  out << "meta.L_hat = " << fmt(est.L_hat) << '\n';
  out << "meta.delta_hat = " << fmt(est.delta_hat) << '\n';
  out << "meta.G_hat = " << fmt(est.G_hat) << '\n';
  out << "meta.max_y1_norm = " << fmt(in.max_y1_norm) << '\n';
  out << "meta.C1 = " << fmt(c.C1) << '\n';
  out << "meta.C2 = " << fmt(c.C2) << '\n';
  out << "meta.C3 = " << fmt(c.C3) << '\n';
  out << "meta.C4 = " << fmt(c.C4) << '\n';
  out << "meta.psi = " << fmt(c.psi) << '\n';
  out << "meta.psi_hat = " << fmt(c.psi_hat) << '\n';
  out << "meta.beta = " << fmt(beta_partial_sum(std::max<long>(cfg.iters, 1))) << '\n';
  return out.str();
}

}  // namespace

void run_experiments(const RunnerConfig& cfg, std::ostream& log, bool dry_run) {
  validate(cfg);
  if (dry_run) {
    log << serialize_config(cfg);
    return;
  }
  ExperimentSetup setup = build_setup(cfg);
  fs::create_directories(cfg.outdir);

  std::string bounds;
  if (cfg.bounds) bounds = bounds_report(cfg, setup);
  write_manifest((fs::path(cfg.outdir) / "manifest.cfg").string(), cfg, setup, bounds);
  if (!bounds.empty()) log << bounds;
  if (setup.reference)
    log << "reference optimum F* = " << fmt(setup.reference->value)
        << " (residual gap " << fmt(setup.reference->residual_gap) << ")\n";

  struct RunJob {
    std::string algorithm;
    long seed;
    std::string path;
  };
  std::vector<RunJob> jobs;
  for (const auto& algo : cfg.algorithms) {
    if (algo == "defw") {
      // deterministic: one trace regardless of the seed sweep
      jobs.push_back({algo, cfg.seeds.front(),
                      (fs::path(cfg.outdir) / (algo + "_seed" + std::to_string(cfg.seeds.front()) +
                                               ".csv")).string()});
      continue;
    }
    for (const long seed : cfg.seeds)
      jobs.push_back({algo, seed,
                      (fs::path(cfg.outdir) / (algo + "_seed" + std::to_string(seed) + ".csv"))
                          .string()});
  }

  const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(jobs.size())));
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  std::mutex log_mutex;
  auto work = [&]() {
    for (;;) {
      const size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        const auto trace = execute_run(setup, cfg, jobs[j].algorithm, jobs[j].seed);
        write_trace_csv_file(jobs[j].path, trace);
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "wrote " << jobs[j].path << " (" << trace.size() << " rows)\n";
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const auto groups = collect_groups(cfg.outdir, cfg.algorithms);
  write_summary_csv((fs::path(cfg.outdir) / "summary.csv").string(), groups);
  const long fit_lo = std::min<long>(100, std::max<long>(1, cfg.iters / 2));
  write_rates_csv((fs::path(cfg.outdir) / "rates.csv").string(), groups, fit_lo, cfg.iters, log);
  print_final_table(log, groups);
  if (cfg.plot) write_metric_plots(cfg.outdir, mean_traces(groups), log);
}

void summarize_directory(const std::string& outdir, long fit_lo, long fit_hi, std::ostream& log) {
  const auto groups = collect_groups(outdir, {});
  if (groups.empty()) throw std::runtime_error("summarize: no trace files in " + outdir);
  write_summary_csv((fs::path(outdir) / "summary.csv").string(), groups);
  write_rates_csv((fs::path(outdir) / "rates.csv").string(), groups, fit_lo, fit_hi, log);
  print_final_table(log, groups);
  log << "wrote " << (fs::path(outdir) / "summary.csv").string() << " and "
      << (fs::path(outdir) / "rates.csv").string() << '\n';
}

}  // namespace dmfw
