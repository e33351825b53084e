#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "dmfw/graph.hpp"
#include "dmfw/rng.hpp"
#include "dmfw/types.hpp"

namespace dmfw {

/// Doubly stochastic weight matrix of a connected graph, with the spectral
/// quantities that govern consensus contraction: |λ| is the magnitude of the
/// second largest eigenvalue, k0 the smallest positive integer with
/// |λ| <= (k0/(k0+1))^2. Immutable after construction.
template <typename Scalar = double>
struct MixingMatrix {
  Matrix<Scalar> weights;
  Scalar lambda{0};
  int k0{1};

  Index size() const { return weights.rows(); }
};

/// One synchronized averaging round: row i of the result is sum_j c_ij v_j.
/// Accepts any dense expression whose rows are the per-agent vectors.
template <typename DerivedC, typename DerivedV>
Matrix<typename DerivedV::Scalar> consensus_round(const Eigen::MatrixBase<DerivedC>& weights,
                                                  const Eigen::MatrixBase<DerivedV>& values) {
  if (values.rows() != weights.rows())
    throw std::invalid_argument("consensus_round: values must have one row per agent");
  return weights * values;
}

template <typename Scalar, typename DerivedV>
Matrix<typename DerivedV::Scalar> consensus_round(const MixingMatrix<Scalar>& mixing,
                                                  const Eigen::MatrixBase<DerivedV>& values) {
  return consensus_round(mixing.weights, values);
}

/// |λ|: magnitude of the second largest eigenvalue of a doubly stochastic
/// matrix. Power iteration on the square of the deflated operator
/// B = C - (1/n)*ones, which leaves only the spectrum orthogonal to the
/// all-ones eigenvector; squaring makes the estimate insensitive to the sign
/// of the dominant remaining eigenvalue. Throws with the last residual if the
/// estimate has not stabilized within the iteration cap.
template <typename Derived>
typename Derived::Scalar second_eigenvalue_magnitude(const Eigen::MatrixBase<Derived>& C,
                                                     typename Derived::Scalar tol = 1e-12,
                                                     int max_iter = 200000) {
  using Scalar = typename Derived::Scalar;
  const Index n = C.rows();
  if (C.cols() != n) throw std::invalid_argument("second_eigenvalue_magnitude: square matrix required");
  if (n == 1) return Scalar(0);

  auto apply_deflated = [&](const Vector<Scalar>& v) -> Vector<Scalar> {
    Vector<Scalar> w = C * v;
    w.array() -= w.mean();  // keep the iterate orthogonal to the ones vector
    return w;
  };

  auto rng = make_engine(0x2c5c5, static_cast<std::uint64_t>(n));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v[i] = static_cast<Scalar>(unif(rng));
  v.array() -= v.mean();
  if (v.norm() < Scalar(1e-30)) return Scalar(0);
  v.normalize();

  Scalar est = Scalar(-1);
  for (int it = 0; it < max_iter; ++it) {
    Vector<Scalar> w = apply_deflated(apply_deflated(v));
    const Scalar growth = w.norm();  // -> |λ|^2 since v is normalized
    if (growth < Scalar(1e-150)) return Scalar(0);
    const Scalar next = std::sqrt(growth);
    v = w / growth;
    const Scalar residual = std::abs(next - est);
    est = next;
    if (residual <= tol * std::max(Scalar(1), est)) return est;
  }
  throw std::runtime_error("second_eigenvalue_magnitude: no convergence after " +
                           std::to_string(max_iter) + " iterations");
}

/// Smallest positive integer k0 with |λ| <= (k0/(k0+1))^2. Equals
/// ceil(1/(|λ|^{-1/2}-1)); defined as 1 when |λ| = 0 (the formula's limit).
template <typename Scalar>
int consensus_index_k0(Scalar lambda) {
  if (!(lambda >= Scalar(0) && lambda < Scalar(1)))
    throw std::invalid_argument("k0: |lambda| must lie in [0, 1)");
  int k0 = 1;
  auto bound = [](int k) { return Scalar(k) * Scalar(k) / (Scalar(k + 1) * Scalar(k + 1)); };
  while (lambda > bound(k0)) ++k0;
  return k0;
}

/// Metropolis-Hastings weights: c_ij = 1/(1+max(deg_i,deg_j)) on edges,
/// c_ii = 1 - sum_j c_ij. Symmetric, hence doubly stochastic, for any graph.
template <typename Scalar = double>
MixingMatrix<Scalar> metropolis_weights(const Graph& g) {
  if (!g.connected())
    throw std::invalid_argument("metropolis_weights: graph must be connected");
  const Index n = g.n;
  const auto deg = g.degrees();
  Matrix<Scalar> C = Matrix<Scalar>::Zero(n, n);
  for (const auto& [a, b] : g.edges) {
    const Index i = a - 1, j = b - 1;
    const Scalar w = Scalar(1) / Scalar(1 + std::max(deg[i], deg[j]));
    C(i, j) = w;
    C(j, i) = w;
  }
  for (Index i = 0; i < n; ++i) C(i, i) = Scalar(1) - C.row(i).sum();

  MixingMatrix<Scalar> m;
  m.weights = std::move(C);
  m.lambda = second_eigenvalue_magnitude(m.weights, Scalar(1e-12));
  m.k0 = consensus_index_k0(m.lambda);
  return m;
}

}  // namespace dmfw
