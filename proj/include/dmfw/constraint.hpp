#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dmfw/types.hpp"

namespace dmfw {

/// lq-norm ball {x : ||x||_q <= radius}, q = 1 or q > 1. The feasible sets of
/// all experiments; diameter D = 2*radius.
template <typename Scalar = double>
struct NormBall {
  Scalar q{2};
  Scalar radius{1};
  Index dim{0};

  Scalar diameter() const { return Scalar(2) * radius; }
};

template <typename Scalar = double>
NormBall<Scalar> norm_ball(Scalar q, Scalar radius, Index dim) {
  if (!(q >= Scalar(1))) throw std::invalid_argument("norm_ball: q must satisfy q >= 1");
  if (!(radius > Scalar(0))) throw std::invalid_argument("norm_ball: radius must be positive");
  if (dim < 1) throw std::invalid_argument("norm_ball: dimension must be >= 1");
  return NormBall<Scalar>{q, radius, dim};
}

/// Conjugate exponent q' with 1/q + 1/q' = 1; q = 1 maps to infinity.
template <typename Scalar>
Scalar conjugate_exponent(Scalar q) {
  if (q == Scalar(1)) return std::numeric_limits<Scalar>::infinity();
  return q / (q - Scalar(1));
}

namespace detail {

// ||v||_e computed on components rescaled by the max magnitude, so that large
// exponents (e.g. q' = 5) neither overflow nor underflow.
template <typename Derived>
typename Derived::Scalar scaled_lp_norm(const Eigen::MatrixBase<Derived>& v,
                                        typename Derived::Scalar e) {
  using Scalar = typename Derived::Scalar;
  const Scalar vmax = v.cwiseAbs().maxCoeff();
  if (vmax == Scalar(0)) return Scalar(0);
  Scalar sum = 0;
  for (Index i = 0; i < v.size(); ++i)
    sum += std::pow(std::abs(v[i]) / vmax, e);
  return vmax * std::pow(sum, Scalar(1) / e);
}

}  // namespace detail

template <typename Scalar, typename Derived>
typename Derived::Scalar lq_norm(const NormBall<Scalar>& ball,
                                 const Eigen::MatrixBase<Derived>& x) {
  if (ball.q == Scalar(1)) return x.template lpNorm<1>();
  if (ball.q == Scalar(2)) return x.norm();
  return detail::scaled_lp_norm(x, ball.q);
}

/// ||p||_{q'} for the ball's conjugate exponent (the value of -<p, lmo(p)>/r).
template <typename Scalar, typename Derived>
typename Derived::Scalar dual_norm(const NormBall<Scalar>& ball,
                                   const Eigen::MatrixBase<Derived>& p) {
  if (ball.q == Scalar(1)) return p.template lpNorm<Eigen::Infinity>();
  if (ball.q == Scalar(2)) return p.norm();
  return detail::scaled_lp_norm(p, conjugate_exponent(ball.q));
}

template <typename Scalar, typename Derived>
bool membership(const NormBall<Scalar>& ball, const Eigen::MatrixBase<Derived>& x,
                Scalar tol = Scalar(1e-9)) {
  if (x.size() != ball.dim) throw std::invalid_argument("membership: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("membership: non-finite component");
  return lq_norm(ball, x) <= ball.radius + tol;
}

/// Linear minimization oracle: argmin_{phi in X} <p, phi>, in closed form.
///   q = 2:   -r p/||p||
///   q = 1:   -r sign(p_{i*}) e_{i*}, i* = argmax |p_i| (lowest index on ties)
///   q > 1:   theta_j = -r sign(p_j) |p_j|^{q'-1} / ||p||_{q'}^{q'-1}
/// p = 0 returns the center, so the Frank-Wolfe step is a no-op at exact
/// stationarity. Attains <p, theta> = -r ||p||_{q'}.
template <typename Scalar, typename Derived>
Vector<typename Derived::Scalar> lmo(const NormBall<Scalar>& ball,
                                     const Eigen::MatrixBase<Derived>& p) {
  using S = typename Derived::Scalar;
  if (p.size() != ball.dim) throw std::invalid_argument("lmo: dimension mismatch");
  if (!p.allFinite()) throw std::invalid_argument("lmo: non-finite component in gradient");

  Vector<S> theta = Vector<S>::Zero(ball.dim);
  const S pmax = p.cwiseAbs().maxCoeff();
  if (pmax == S(0)) return theta;

  if (ball.q == Scalar(1)) {
    Index best = 0;
    S best_abs = std::abs(p[0]);
    for (Index i = 1; i < p.size(); ++i) {
      const S a = std::abs(p[i]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    theta[best] = p[best] > S(0) ? -ball.radius : ball.radius;
    return theta;
  }
  if (ball.q == Scalar(2)) {
    theta = -(ball.radius / p.norm()) * p;
    return theta;
  }

  const S qc = conjugate_exponent(static_cast<S>(ball.q));
  // Work on u = |p|/pmax so u^{q'-1} and the norm stay in range.
  S sum = 0;
  for (Index i = 0; i < p.size(); ++i) sum += std::pow(std::abs(p[i]) / pmax, qc);
  const S denom = std::pow(sum, (qc - S(1)) / qc);
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] == S(0)) continue;
    const S mag = std::pow(std::abs(p[i]) / pmax, qc - S(1)) / denom;
    theta[i] = p[i] > S(0) ? -ball.radius * mag : ball.radius * mag;
  }
  return theta;
}

/// Uniform-ish sample of a feasible point: random direction scaled to a
/// random fraction of the boundary. Exact uniformity is irrelevant here; the
/// samples only feed property tests and empirical constant estimates.
template <typename Scalar>
Vector<Scalar> random_feasible_point(const NormBall<Scalar>& ball, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector<Scalar> x(ball.dim);
  for (Index i = 0; i < ball.dim; ++i) x[i] = static_cast<Scalar>(gauss(rng));
  const Scalar nrm = lq_norm(ball, x);
  if (nrm == Scalar(0)) return Vector<Scalar>::Zero(ball.dim);
  const Scalar scale = ball.radius * static_cast<Scalar>(unif(rng)) / nrm;
  return scale * x;
}

}  // namespace dmfw
