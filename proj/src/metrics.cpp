#include "dmfw/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dmfw/rng.hpp"

namespace dmfw {

double fw_gap(const ObjectiveAggregate& objective, const NormBall<double>& set,
              const VectorXd& xbar) {
  const VectorXd g = objective.full_gradient(xbar);
  if (!g.allFinite()) throw std::runtime_error("fw_gap: non-finite gradient");
  const VectorXd theta = lmo(set, g);
  return g.dot(xbar - theta);
}

double consensus_error(const MatrixXd& xhat, const VectorXd& xbar) {
  double worst = 0;
  for (Index i = 0; i < xhat.rows(); ++i)
    worst = std::max(worst, (xhat.row(i).transpose() - xbar).norm());
  return worst;
}

VectorXd tracked_mean_gradient(const ObjectiveAggregate& objective, const MatrixXd& xhat) {
  if (xhat.rows() != objective.size())
    throw std::invalid_argument("tracked_mean_gradient: one row per agent required");
  VectorXd acc = VectorXd::Zero(objective.dim());
  for (Index i = 0; i < xhat.rows(); ++i)
    acc += objective.part(i).full_gradient(xhat.row(i).transpose());
  return acc / static_cast<double>(objective.size());
}

double per_agent_deviation(const MatrixXd& tracked, const VectorXd& ybar) {
  double sum = 0;
  for (Index i = 0; i < tracked.rows(); ++i)
    sum += (tracked.row(i).transpose() - ybar).squaredNorm();
  return std::sqrt(sum);
}

ReferenceOptimum reference_optimum(const ObjectiveAggregate& objective,
                                   const NormBall<double>& set, long budget) {
  if (!objective.convex())
    throw std::logic_error(
        "reference_optimum: objective is nonconvex; suboptimality is undefined (use fw_gap)");
  if (budget < 1) throw std::invalid_argument("reference_optimum: budget must be >= 1");
  VectorXd x = VectorXd::Zero(set.dim);
  ReferenceOptimum out;
  out.value = objective.value(x);
  out.iterations = budget;
  for (long k = 1; k <= budget; ++k) {
    const VectorXd g = objective.full_gradient(x);
    const VectorXd theta = lmo(set, g);
    out.residual_gap = g.dot(x - theta);
    x += (2.0 / static_cast<double>(k + 2)) * (theta - x);
    out.value = std::min(out.value, objective.value(x));
  }
  return out;
}

namespace {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

void check_fit_inputs(std::span<const double> ks, std::span<const double> values) {
  if (ks.size() != values.size()) throw std::invalid_argument("fit: length mismatch");
  if (ks.size() < 10) throw std::invalid_argument("fit: need at least 10 points");
  for (size_t i = 0; i < ks.size(); ++i)
    if (!(ks[i] > 0) || !(values[i] > 0))
      throw std::invalid_argument("fit: nonpositive value in range");
}

}  // namespace

double fit_loglog_slope(std::span<const double> ks, std::span<const double> values) {
  check_fit_inputs(ks, values);
  std::vector<double> lx(ks.size()), ly(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) {
    lx[i] = std::log(ks[i]);
    ly[i] = std::log(values[i]);
  }
  return least_squares(lx, ly).slope;
}

InvLog2Fit fit_inverse_log2(std::span<const double> ks, std::span<const double> values) {
  check_fit_inputs(ks, values);
  std::vector<double> xs(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] <= 1.0) throw std::invalid_argument("fit: inverse-log abscissa needs k > 1");
    xs[i] = 1.0 / std::log2(ks[i]);
  }
  const auto f = least_squares(xs, std::span<const double>(values));
  return InvLog2Fit{f.intercept, f.slope, f.r2};
}

double beta_partial_sum(long K) {
  if (K < 1) throw std::invalid_argument("beta_partial_sum: K must be >= 1");
  double sum = 0;
  for (long k = 1; k <= K; ++k) sum += 2.0 / std::pow(static_cast<double>(k + 2), 1.5);
  return sum;
}

EmpiricalConstants estimate_constants(const ObjectiveAggregate& objective,
                                      const NormBall<double>& set, std::uint64_t seed,
                                      int pairs, int draws_per_agent) {
  auto rng = make_engine(seed, 0x636f6e73);
  EmpiricalConstants out;
  for (int t = 0; t < pairs; ++t) {
    const VectorXd u = random_feasible_point(set, rng);
    const VectorXd v = random_feasible_point(set, rng);
    const double dist = (u - v).norm();
    if (dist < 1e-12) continue;
    const double ratio =
        (objective.full_gradient(u) - objective.full_gradient(v)).norm() / dist;
    out.L_hat = std::max(out.L_hat, ratio);
  }
  for (Index i = 0; i < objective.size(); ++i) {
    const auto& obj = objective.part(i);
    std::uniform_int_distribution<Index> pick(0, obj.sample_count() - 1);
    double res_sq = 0, mag_sq = 0;
    for (int t = 0; t < draws_per_agent; ++t) {
      const VectorXd x = random_feasible_point(set, rng);
      const Index s = pick(rng);
      const std::array<Index, 1> batch{s};
      const VectorXd gs = obj.sample_gradient(x, std::span<const Index>(batch));
      res_sq += (gs - obj.full_gradient(x)).squaredNorm();
      mag_sq += gs.squaredNorm();
    }
    out.delta_hat = std::max(out.delta_hat, std::sqrt(res_sq / draws_per_agent));
    out.G_hat = std::max(out.G_hat, std::sqrt(mag_sq / draws_per_agent));
  }
  return out;
}

BoundConstants bound_constants(const BoundInputs& in) {
  BoundConstants c;
  const double D = in.diameter;
  const double n = in.agents;
  const double L = in.L_hat, G = in.G_hat, delta = in.delta_hat;
  c.C1 = in.k0 * std::sqrt(n) * D;
  const double span = D + 2.0 * c.C1;
  c.psi = std::max(in.max_y1_norm, 2.0 * G + 2.0 * L * span);
  c.psi_hat = std::max(in.max_y1_norm * in.max_y1_norm,
                       4.0 * L * span * c.psi + 4.0 * G * c.psi + 8.0 * G * G +
                           8.0 * L * L * span * span);
  c.C2 = std::pow(static_cast<double>(in.k0), 3.0) * std::pow(4.0 * n, in.k0) * n *
         (12.0 * L * L * span * span + 12.0 * (G * G + c.psi_hat));
  c.C3 = 24.0 * L * L * span * span + 12.0 * delta * delta;
  const double radic = std::sqrt(12.0 * L * L * c.C1 * c.C1 + 3.0 * c.C3 + 12.0 * c.C2);
  if (in.initial_suboptimality.has_value()) {
    c.C4 = std::max(std::sqrt(3.0) * *in.initial_suboptimality,
                    2.0 * L * D * D + 2.0 * D * radic);
  } else {
    c.C4 = std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

}  // namespace dmfw
