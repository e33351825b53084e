// Acceptance suite: one binary, one pass/fail line per criterion. Criteria
// 5-10 run on a deterministic synthetic stand-in shaped like the desk-scale
// binary-classification subset (2000 x 123 sparse 0/1 features, noisy labels
// from a hidden logistic model), generated here, written as LIBSVM text and
// ingested through the production parser. Criterion 11 drives the CLI binary
// passed via --cli.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dmfw/baselines.hpp"
#include "dmfw/data.hpp"
#include "dmfw/dmfw.hpp"
#include "dmfw/metrics.hpp"
#include "dmfw/runner.hpp"
#include "test_support.hpp"

using namespace dmfw;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const char* name, bool pass, const std::string& detail, bool warn_only = false) {
  const char* tag = pass ? "[PASS]" : (warn_only ? "[WARN]" : "[FAIL]");
  if (!pass && !warn_only) ++g_failures;
  std::cout << tag << ' ' << name << ": " << detail << '\n' << std::flush;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Instance {
  Dataset ds;
  std::vector<StochasticObjective> locals;
  NormBall<double> ball;
  MixingMatrix<double> mixing;
  std::unique_ptr<ObjectiveAggregate> agg;

  Instance(const Dataset& data, int agents, const Graph& g, LossKind kind, double lambda1,
           double radius = 5.0)
      : ds(data),
        locals(testsupport::split_objectives(ds, agents, kind, lambda1, 555)),
        ball(norm_ball(2.0, radius, ds.dim)),
        mixing(metropolis_weights(g)) {
    agg = std::make_unique<ObjectiveAggregate>(testsupport::pointers(locals));
  }
};

double trace_at(const std::vector<TraceRecord>& t, long k, double TraceRecord::*field) {
  for (const auto& r : t)
    if (r.k == k) return r.*field;
  throw std::runtime_error("trace: no record at k=" + std::to_string(k));
}

// ---------------------------------------------------------------------------

void criterion1_exact_identities() {
  const Dataset ds = testsupport::synth_classification(600, 30, 0.3, 1.0, 0.05, 42);
  Instance inst(ds, 6, make_random_connected(6, 0.5, 12), LossKind::logistic, 0.0);
  DmfwOptions opts;
  opts.batch_fraction = 0.01;
  DmfwEngine eng(testsupport::pointers(inst.locals), inst.ball, inst.mixing, opts, 31);
  double worst_tracking = 0, worst_recursion = 0;
  for (long k = 1; k <= 500; ++k) {
    const VectorXd sbar = eng.tracker().colwise().mean().transpose();
    worst_tracking = std::max(worst_tracking,
                              (sbar - eng.mean_momentum()).cwiseAbs().maxCoeff());
    const VectorXd xbar = eng.mean_iterate();
    eng.advance();
    const VectorXd theta_bar = eng.last_vertices().colwise().mean().transpose();
    const VectorXd expect = (1.0 - eng.last_eta()) * xbar + eng.last_eta() * theta_bar;
    worst_recursion = std::max(worst_recursion,
                               (eng.mean_iterate() - expect).cwiseAbs().maxCoeff());
  }
  const bool pass = worst_tracking <= 1e-10 && worst_recursion <= 1e-10;
  report("C1 exact identities (mean tracking, mean-iterate recursion)", pass,
         "500 iterations, max deviations " + fmt(worst_tracking) + " / " + fmt(worst_recursion) +
             " (tol 1e-10)");
}

void criterion2_consensus_bound() {
  int graphs_checked = 0;
  double worst_margin = -1e300;  // max over runs of (dev - bound)
  auto rng = make_engine(2024, 2);
  std::uniform_int_distribution<int> n_pick(3, 10);
  std::uniform_real_distribution<double> p_pick(0.35, 0.8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = n_pick(rng);
    const Graph g = make_random_connected(n, p_pick(rng), 1000 + trial);
    const Dataset ds =
        testsupport::synth_classification(static_cast<size_t>(40 * n), 10, 0.4, 1.0, 0.1,
                                          7000 + trial);
    Instance inst(ds, n, g, LossKind::logistic, 0.0);
    DmfwOptions opts;
    opts.batch_fraction = 0.0;  // single-sample batches
    DmfwEngine eng(testsupport::pointers(inst.locals), inst.ball, inst.mixing, opts,
                   90 + trial);
    const double C1 = inst.mixing.k0 * std::sqrt(double(n)) * inst.ball.diameter();
    for (long k = 1; k <= 1000; ++k) {
      const VectorXd xbar = eng.mean_iterate();
      const double bound = 2.0 * C1 / static_cast<double>(k + 2) + 1e-9;
      for (Index i = 0; i < n; ++i) {
        const double dev = (eng.consensus_iterates().row(i).transpose() - xbar).norm();
        worst_margin = std::max(worst_margin, dev - bound);
      }
      eng.advance();
    }
    ++graphs_checked;
  }
  report("C2 pathwise consensus contraction bound", worst_margin <= 0.0,
         std::to_string(graphs_checked) + " random graphs x 1000 iterations, worst (dev - bound) = " +
             fmt(worst_margin) + " (strict)");
}

void criterion3_lmo_equivalence() {
  auto rng = make_engine(3, 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> dim_pick(1, 20);
  bool l1_ok = true;
  for (int t = 0; t < 1000; ++t) {
    const int d = dim_pick(rng);
    const auto ball = norm_ball(1.0, 5.0, d);
    VectorXd p(d);
    for (int i = 0; i < d; ++i) p[i] = gauss(rng);
    const VectorXd fast = lmo(ball, p);
    // brute force over vertices +-5 e_i, first strict minimizer wins
    VectorXd best = VectorXd::Zero(d);
    double best_val = 0;
    for (int i = 0; i < d; ++i)
      for (const double sgn : {+1.0, -1.0}) {
        VectorXd v = VectorXd::Zero(d);
        v[i] = sgn * 5.0;
        if (p.dot(v) < best_val) {
          best = v;
          best_val = p.dot(v);
        }
      }
    if ((fast - best).cwiseAbs().maxCoeff() != 0.0) l1_ok = false;
  }
  double worst_rel = 0;
  for (const double q : {2.0, 1.25}) {
    const auto ball = norm_ball(q, 5.0, 30);
    for (int t = 0; t < 1000; ++t) {
      VectorXd p(30);
      for (int i = 0; i < 30; ++i) p[i] = gauss(rng);
      const double attained = p.dot(lmo(ball, p));
      const double dual = -ball.radius * dual_norm(ball, p);
      worst_rel = std::max(worst_rel, std::abs(attained - dual) / std::abs(dual));
    }
  }
  report("C3 LMO oracle equivalence (l1 brute force; l2, l5/4 duality)",
         l1_ok && worst_rel <= 1e-9,
         std::string("l1 exact: ") + (l1_ok ? "yes" : "NO") + ", worst duality rel err " +
             fmt(worst_rel) + " (tol 1e-9)");
}

void criterion4_gradient_checks() {
  auto rng = make_engine(4, 4);
  const auto ball = norm_ball(2.0, 5.0, 8);
  double worst = 0;
  const auto check = [&](const StochasticObjective& obj) {
    for (int t = 0; t < 100; ++t) {
      const VectorXd x = random_feasible_point(ball, rng);
      const VectorXd g = obj.full_gradient(x);
      VectorXd fd(8);
      for (Index j = 0; j < 8; ++j) {
        VectorXd up = x, dn = x;
        up[j] += 1e-6;
        dn[j] -= 1e-6;
        fd[j] = (obj.value(up) - obj.value(dn)) / 2e-6;
      }
      worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
    }
  };
  Dataset ds = testsupport::synth_classification(60, 8, 0.5, 1.0, 0.0, 44);
  auto rows = ds.rows;
  check(StochasticObjective::classification(LossKind::logistic, rows, 8));
  check(StochasticObjective::classification(LossKind::sigmoid_nc, rows, 8, 5e-6));
  check(StochasticObjective::ridge_synthetic(8, 60, 5e-6, 45));
  report("C4 gradient correctness vs central differences", worst < 1e-5,
         "100 draws x 3 objective kinds, worst rel err " + fmt(worst) + " (tol 1e-5)");
}

struct ConvexSweep {
  std::vector<std::vector<TraceRecord>> traces;  // per seed
  double fstar = 0;
};

ConvexSweep run_convex_sweep(const Instance& inst, int n_seeds, long iters) {
  ConvexSweep sweep;
  const auto ref = reference_optimum(*inst.agg, inst.ball, 50000);
  sweep.fstar = ref.value;
  for (int seed = 1; seed <= n_seeds; ++seed) {
    DmfwOptions opts;
    opts.batch_fraction = 0.01;
    opts.fstar = ref.value;
    sweep.traces.push_back(run_dmfw(testsupport::pointers(inst.locals), inst.ball, inst.mixing,
                                    iters, static_cast<std::uint64_t>(seed), opts));
  }
  return sweep;
}

std::vector<long> recorded_ks(const std::vector<TraceRecord>& t, long lo, long hi) {
  std::vector<long> ks;
  for (const auto& r : t)
    if (r.k >= lo && r.k <= hi) ks.push_back(r.k);
  return ks;
}

double seed_mean(const ConvexSweep& s, long k, double TraceRecord::*field) {
  double acc = 0;
  for (const auto& t : s.traces) acc += trace_at(t, k, field);
  return acc / static_cast<double>(s.traces.size());
}

void criteria5_6_7(const Instance& inst, const ConvexSweep& sweep) {
  const auto ks = recorded_ks(sweep.traces[0], 100, 2000);

  // C5: log-log slope of seed-averaged suboptimality
  std::vector<double> xs, subs, pads;
  for (const long k : ks) {
    xs.push_back(static_cast<double>(k));
    subs.push_back(seed_mean(sweep, k, &TraceRecord::subopt));
  }
  const double slope = fit_loglog_slope(xs, subs);
  report("C5 convex rate: seed-averaged suboptimality slope", slope >= -1.1 && slope <= -0.4,
         "20 seeds, k in [100,2000], slope " + fmt(slope) + " (band [-1.1, -0.4])");

  // C6: variance decay of ||Pbar - ybar||^2
  const double t100 = seed_mean(sweep, 100, &TraceRecord::tracking_err_sq);
  const double t400 = seed_mean(sweep, 400, &TraceRecord::tracking_err_sq);
  const double t1600 = seed_mean(sweep, 1600, &TraceRecord::tracking_err_sq);
  const bool decay = t1600 <= 0.25 * t100;
  const bool monotone = t100 > t400 && t400 > t1600;
  report("C6 variance decay of the tracked direction", decay,
         "mean tracking_err_sq " + fmt(t100) + " @100 -> " + fmt(t400) + " @400 -> " + fmt(t1600) +
             " @1600; ratio " + fmt(t1600 / t100) + " (need <= 0.25); decreasing: " +
             (monotone ? "yes" : "no"));

  // C7: per-agent tracking deviation squared, log-log slope
  for (const long k : ks) {
    double acc = 0;
    for (const auto& t : sweep.traces) {
      const double dev = trace_at(t, k, &TraceRecord::per_agent_dev);
      acc += dev * dev;
    }
    pads.push_back(acc / static_cast<double>(sweep.traces.size()));
  }
  const double pad_slope = fit_loglog_slope(xs, pads);
  report("C7 per-agent tracking deviation decay", pad_slope >= -2.6 && pad_slope <= -1.4,
         "seed-averaged sum_i ||p_i - ybar||^2 slope " + fmt(pad_slope) + " (band [-2.6, -1.4])");
}

void criterion8_batch_one(const Instance& inst) {
  DmfwOptions opts;
  opts.batch_fraction = 0.0;  // exactly one sample per agent per iteration
  DmfwEngine eng(testsupport::pointers(inst.locals), inst.ball, inst.mixing, opts, 7);
  double gap10 = -1, gap5000 = -1;
  bool feasible = true, finite = true;
  for (long k = 1; k <= 5000; ++k) {
    for (Index i = 0; i < eng.agents(); ++i) {
      if (!membership(inst.ball, eng.iterates().row(i).transpose()) ||
          !membership(inst.ball, eng.consensus_iterates().row(i).transpose()))
        feasible = false;
    }
    if (!eng.iterates().allFinite()) finite = false;
    if (k == 10) gap10 = fw_gap(*inst.agg, inst.ball, eng.mean_iterate());
    if (k == 5000) gap5000 = fw_gap(*inst.agg, inst.ball, eng.mean_iterate());
    if (k < 5000) eng.advance();
  }
  const bool pass = finite && feasible && gap5000 <= 0.2 * gap10;
  report("C8 batch-size-1 convergence", pass,
         "fw_gap " + fmt(gap10) + " @10 -> " + fmt(gap5000) + " @5000, ratio " +
             fmt(gap5000 / gap10) + " (need <= 0.2); feasible: " + (feasible ? "yes" : "NO") +
             ", finite: " + (finite ? "yes" : "NO"));
}

void criterion9_nonconvex(const Dataset& ds) {
  Instance inst(ds, 5, make_ring(5), LossKind::sigmoid_nc, 5e-6);
  double mean_g16 = 0, mean_min = 0;
  bool running_min_ok = true;
  for (int seed = 1; seed <= 10; ++seed) {
    DmfwOptions opts;
    opts.batch_fraction = 0.01;
    const auto trace = run_dmfw(testsupport::pointers(inst.locals), inst.ball, inst.mixing, 4096,
                                static_cast<std::uint64_t>(seed), opts);
    mean_g16 += trace_at(trace, 16, &TraceRecord::fw_gap);
    double running = 1e300, minimum = 1e300;
    for (const auto& r : trace) {
      if (r.fw_gap < minimum) minimum = r.fw_gap;
      const double next_running = std::min(running, r.fw_gap);
      if (next_running > running + 1e-15) running_min_ok = false;
      running = next_running;
    }
    mean_min += minimum;
  }
  mean_g16 /= 10.0;
  mean_min /= 10.0;
  const bool pass = running_min_ok && mean_min <= 0.5 * mean_g16;
  report("C9 nonconvex trend (sigmoid loss)", pass,
         "10 seeds, K=4096: mean g@16 " + fmt(mean_g16) + ", mean min gap " + fmt(mean_min) +
             ", ratio " + fmt(mean_min / mean_g16) + " (need <= 0.5); running minimum non-increasing: " +
             (running_min_ok ? "yes" : "NO"));
}

void criterion10_baseline_ordering(const Instance& inst, const ConvexSweep& sweep) {
  auto pooled_rows = inst.ds.rows;
  const auto pooled = StochasticObjective::classification(LossKind::logistic,
                                                          std::move(pooled_rows), inst.ds.dim);
  double dmfw_final = 0, mshfw_final = 0, sfw_final = 0;
  const int n_seeds = static_cast<int>(sweep.traces.size());
  for (const auto& t : sweep.traces) dmfw_final += t.back().subopt;
  dmfw_final /= n_seeds;
  for (int seed = 1; seed <= n_seeds; ++seed) {
    DmfwOptions mopts;
    mopts.batch_fraction = 0.01;
    mopts.fstar = sweep.fstar;
    mopts.metrics_objective = inst.agg.get();
    mshfw_final += run_mshfw(pooled, inst.ball, 2000, static_cast<std::uint64_t>(seed), mopts)
                       .back()
                       .subopt;
    SfwOptions sopts;
    sopts.batch_fraction = 0.01;
    sopts.fstar = sweep.fstar;
    sopts.metrics_objective = inst.agg.get();
    sfw_final += run_sfw(pooled, inst.ball, 2000, static_cast<std::uint64_t>(seed), sopts)
                     .back()
                     .subopt;
  }
  mshfw_final /= n_seeds;
  sfw_final /= n_seeds;
  const bool pass = dmfw_final <= sfw_final && mshfw_final <= sfw_final;
  report("C10 baseline ordering (DMFW, MSHFW vs SFW at k=2000)", pass,
         "final subopt: dmfw " + fmt(dmfw_final) + ", mshfw " + fmt(mshfw_final) + ", sfw " +
             fmt(sfw_final),
         /*warn_only=*/true);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion11_determinism(const std::string& cli, const fs::path& scratch,
                             const std::string& dataset_path) {
  if (cli.empty()) {
    report("C11 determinism via CLI", false, "no --cli path provided");
    return;
  }
  const fs::path outdir = scratch / "det";
  fs::remove_all(outdir);
  const std::string base_cmd = "\"" + cli + "\" run --algorithm dmfw --topology ring --agents 5" +
                               " --dataset \"" + dataset_path + "\" --objective logistic" +
                               " --constraint l2:5 --iters 300 --batch-frac 0.01 --seeds 1..2" +
                               " --timing off --fstar-budget 4000 --outdir \"" + outdir.string() +
                               "\" > /dev/null";
  const int rc1 = std::system(("DMFW_THREADS=1 " + base_cmd).c_str());
  const auto t1a = slurp(outdir / "dmfw_seed1.csv");
  const auto t1b = slurp(outdir / "dmfw_seed2.csv");
  const auto manifest = slurp(outdir / "manifest.cfg");
  const fs::path saved = scratch / "saved_manifest.cfg";
  fs::copy_file(outdir / "manifest.cfg", saved, fs::copy_options::overwrite_existing);

  // rerun from the manifest alone, different worker count, same outdir
  const std::string rerun = "DMFW_THREADS=4 \"" + cli + "\" run --config \"" + saved.string() +
                            "\" > /dev/null";
  const int rc2 = std::system(rerun.c_str());
  const auto t2a = slurp(outdir / "dmfw_seed1.csv");
  const auto t2b = slurp(outdir / "dmfw_seed2.csv");
  const auto manifest2 = slurp(outdir / "manifest.cfg");

  const bool pass = rc1 == 0 && rc2 == 0 && !t1a.empty() && t1a == t2a && t1b == t2b &&
                    manifest == manifest2;
  report("C11 determinism (manifest rerun, DMFW_THREADS 1 vs 4)", pass,
         std::string("trace bytes identical: ") + (t1a == t2a && t1b == t2b ? "yes" : "NO") +
             ", manifest identical: " + (manifest == manifest2 ? "yes" : "NO") + ", exit codes " +
             std::to_string(rc1) + "/" + std::to_string(rc2));
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

  const auto t0 = std::chrono::steady_clock::now();
  const fs::path scratch = fs::temp_directory_path() / "dmfw_acceptance";
  fs::create_directories(scratch);

  // shared desk-scale instance, routed through the LIBSVM pipeline
  const std::string data_path = (scratch / "synth_a9a_scale.libsvm").string();
  {
    const Dataset ds = testsupport::acceptance_instance();
    std::ofstream out(data_path);
    write_libsvm(out, ds);
  }
  const Dataset ds = load_libsvm_file(data_path);

  criterion1_exact_identities();
  criterion2_consensus_bound();
  criterion3_lmo_equivalence();
  criterion4_gradient_checks();

  Instance convex(ds, 5, make_ring(5), LossKind::logistic, 0.0);
  const ConvexSweep sweep = run_convex_sweep(convex, 20, 2000);
  criteria5_6_7(convex, sweep);
  criterion8_batch_one(convex);
  criterion9_nonconvex(ds);
  criterion10_baseline_ordering(convex, sweep);
  criterion11_determinism(cli, scratch, data_path);

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed")
            << " (" << static_cast<long>(elapsed) << " s)\n";
  return g_failures == 0 ? 0 : 1;
}
