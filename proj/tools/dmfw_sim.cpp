// Experiment runner: constructs topology/objective/algorithm from flags or a
// config file, executes seeded runs in parallel worker slots, and writes CSV
// traces plus seed-averaged summaries.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "dmfw/config.hpp"
#include "dmfw/runner.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::string algorithm, topology, dataset, objective, constraint, seeds, outdir, timing;
  int agents = 0;
  long iters = 0, subsample = 0, seed = 0, data_seed = 0, ridge_dim = 0, ridge_samples = 0,
       fstar_budget = 0;
  double batch_frac = 0;
  int metric_cadence = 0;
  bool plot = false, dry_run = false, bounds = false, no_shuffle = false;
  double lambda1 = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DMFW simulator: distributed momentum-based Frank-Wolfe over agent networks"};
  app.require_subcommand(1);

  RunFlags f;
  auto* run = app.add_subcommand("run", "execute (algorithm x seed) experiments");
  auto* o_algo = run->add_option("--algorithm", f.algorithm, "comma list: dmfw,mshfw,sfw,defw");
  auto* o_topo = run->add_option("--topology", f.topology, "ring | complete | random:<p> | file:<path>");
  auto* o_agents = run->add_option("--agents", f.agents, "number of agents");
  auto* o_data = run->add_option("--dataset", f.dataset, "LIBSVM file (plain or .gz)");
  auto* o_obj = run->add_option("--objective", f.objective, "logistic | sigmoid-nc | ridge");
  auto* o_con = run->add_option("--constraint", f.constraint, "<q>:<radius>, e.g. l2:5 or 5/4:5");
  auto* o_iters = run->add_option("--iters", f.iters, "iteration count K");
  auto* o_bf = run->add_option("--batch-frac", f.batch_frac, "batch fraction of local data (0 -> single sample)");
  auto* o_seed = run->add_option("--seed", f.seed, "single seed");
  auto* o_seeds = run->add_option("--seeds", f.seeds, "seed sweep: 1..20 or 1,2,9");
  auto* o_out = run->add_option("--outdir", f.outdir, "output directory");
  auto* o_cad = run->add_option("--metric-cadence", f.metric_cadence, "record every c-th iteration after k=100");
  auto* o_plot = run->add_flag("--plot", f.plot, "write SVG metric curves");
  run->add_option("--config", f.config, "key=value config file; flags override");
  run->add_flag("--dry-run", f.dry_run, "print resolved config and exit");
  auto* o_sub = run->add_option("--subsample", f.subsample, "use a seeded subset of the dataset");
  auto* o_dseed = run->add_option("--data-seed", f.data_seed, "seed for subsampling/partition/synthetic data");
  auto* o_noshuf = run->add_flag("--no-shuffle", f.no_shuffle, "partition in file order");
  auto* o_lam = run->add_option("--lambda1", f.lambda1, "regularization weight (sigmoid-nc, ridge)");
  auto* o_rd = run->add_option("--ridge-dim", f.ridge_dim, "ridge: problem dimension");
  auto* o_rs = run->add_option("--ridge-samples", f.ridge_samples, "ridge: samples per agent");
  auto* o_fb = run->add_option("--fstar-budget", f.fstar_budget, "reference-optimum FW iterations");
  auto* o_bnd = run->add_flag("--bounds", f.bounds, "estimate L/delta/G and report bound constants");
  auto* o_tim = run->add_option("--timing", f.timing, "on|off: wall-clock elapsed_s column");

  std::string sum_dir;
  long fit_lo = 100, fit_hi = 0;
  auto* summarize = app.add_subcommand("summarize", "aggregate existing trace CSVs");
  summarize->add_option("--outdir", sum_dir, "directory holding <algo>_seed<k>.csv files")
      ->required();
  summarize->add_option("--fit-lo", fit_lo, "rate fit lower k (default 100)");
  summarize->add_option("--fit-hi", fit_hi, "rate fit upper k (default: max recorded)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      dmfw::RunnerConfig cfg;
      if (!f.config.empty()) cfg = dmfw::load_config_file(f.config);
      auto set = [](const CLI::Option* opt) { return opt->count() > 0; };
      if (set(o_algo)) dmfw::apply_config_entry(cfg, "algorithm", f.algorithm);
      if (set(o_topo)) cfg.topology = f.topology;
      if (set(o_agents)) cfg.agents = f.agents;
      if (set(o_data)) cfg.dataset = f.dataset;
      if (set(o_obj)) cfg.objective = f.objective;
      if (set(o_con)) cfg.constraint = f.constraint;
      if (set(o_iters)) cfg.iters = f.iters;
      if (set(o_bf)) cfg.batch_frac = f.batch_frac;
      if (set(o_seed)) cfg.seeds = {f.seed};
      if (set(o_seeds)) cfg.seeds = dmfw::parse_seed_spec(f.seeds);
      if (set(o_out)) cfg.outdir = f.outdir;
      if (set(o_cad)) cfg.metric_cadence = f.metric_cadence;
      if (set(o_plot)) cfg.plot = f.plot;
      if (set(o_sub)) cfg.subsample = f.subsample;
      if (set(o_dseed)) cfg.data_seed = static_cast<std::uint64_t>(f.data_seed);
      if (set(o_noshuf)) cfg.shuffle = false;
      if (set(o_lam)) cfg.lambda1 = f.lambda1;
      if (set(o_rd)) cfg.ridge_dim = f.ridge_dim;
      if (set(o_rs)) cfg.ridge_samples = f.ridge_samples;
      if (set(o_fb)) cfg.fstar_budget = f.fstar_budget;
      if (set(o_bnd)) cfg.bounds = f.bounds;
      if (set(o_tim)) dmfw::apply_config_entry(cfg, "timing", f.timing);
      dmfw::run_experiments(cfg, std::cout, f.dry_run);
    } else if (summarize->parsed()) {
      dmfw::summarize_directory(sum_dir, fit_lo, fit_hi > 0 ? fit_hi : 1L << 60, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
