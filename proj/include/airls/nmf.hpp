// Copyright 2026 The AIRLS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AIRLS_NMF_HPP
#define AIRLS_NMF_HPP

/**
 * @file nmf.hpp
 * @brief Projected Newton-type low-rank NMF.
 *
 * Every half-step takes the surrogate block H = F^T F + lambda D, partially
 * diagonalizes it per row on the active constraint set of that row, and moves
 * along the projection arc
 *
 *   X(alpha) = [X - alpha (H^I)^{-1} grad]_+ ,   alpha = beta^m,
 *
 * with m the first nonnegative integer satisfying the Armijo condition on the
 * arc. Nonnegativity comes only from the projection.
 */

#include "airls/active_set.hpp"
#include "airls/core.hpp"
#include "airls/denoise.hpp"
#include "airls/proximity.hpp"
#include "airls/solver_common.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <functional>

namespace airls {

/**
 * Row-wise scaled directions (H^{I_i})^{-1} g_i. Active coordinates are
 * decoupled, so they get g_ij / H_jj and the free coordinates solve against
 * the free principal submatrix of H.
 */
inline Matrix newton_directions(const Matrix& grad, const Matrix& h_tilde, const ActiveSet& active) {
  const Index d = h_tilde.rows();
  require(h_tilde.cols() == d && grad.cols() == d, ErrorKind::InvalidInput,
          "block and gradient dimensions differ");
  require(active.rows.size() == static_cast<std::size_t>(grad.rows()), ErrorKind::InvalidInput,
          "active set has the wrong number of rows");
  Eigen::LLT<Matrix> full(h_tilde);
  require(full.info() == Eigen::Success, ErrorKind::InvalidInput,
          "surrogate block is not positive definite");
  Matrix dir(grad.rows(), d);
  std::vector<char> is_active(static_cast<std::size_t>(d));
  for (Index i = 0; i < grad.rows(); ++i) {
    const auto& set = active.rows[static_cast<std::size_t>(i)];
    if (set.empty()) {
      dir.row(i) = full.solve(grad.row(i).transpose()).transpose();
      continue;
    }
    std::fill(is_active.begin(), is_active.end(), 0);
    for (Index j : set) is_active[static_cast<std::size_t>(j)] = 1;
    std::vector<Index> free;
    for (Index j = 0; j < d; ++j)
      if (!is_active[static_cast<std::size_t>(j)]) free.push_back(j);
    for (Index j : set) dir(i, j) = grad(i, j) / h_tilde(j, j);
    if (free.empty()) continue;
    const auto nf = static_cast<Index>(free.size());
    Matrix sub(nf, nf);
    Vector rhs(nf);
    for (Index a = 0; a < nf; ++a) {
      rhs[a] = grad(i, free[static_cast<std::size_t>(a)]);
      for (Index b = 0; b < nf; ++b)
        sub(a, b) = h_tilde(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
    }
    const Vector x = sub.llt().solve(rhs);
    for (Index a = 0; a < nf; ++a) dir(i, free[static_cast<std::size_t>(a)]) = x[a];
  }
  return dir;
}

/// Row i: max(0, x_i - alpha (H^{I_i})^{-1} g_i).
inline Matrix projected_newton_step(const Matrix& factor, const Matrix& grad,
                                    const Matrix& h_tilde, const ActiveSet& active, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, ErrorKind::InvalidParameter, "alpha must lie in (0,1]");
  require(factor.rows() == grad.rows() && factor.cols() == grad.cols(), ErrorKind::InvalidInput,
          "factor and gradient shapes differ");
  const Matrix dir = newton_directions(grad, h_tilde, active);
  return (factor - alpha * dir).cwiseMax(0.0);
}

struct ArmijoResult {
  int m_k = 0;
  double alpha = 1.0;
  bool accepted = false;
  double decrease = 0.0;  // f(X) - f(X(alpha)) at the returned alpha
  double rhs = 0.0;       // sufficient-decrease bound at the returned alpha
  Matrix candidate;       // X(alpha)
};

/**
 * Right side of the Armijo condition on the projection arc:
 *   sigma * ( alpha * sum_{free} g * dir  +  sum_{active} g * (X - X(alpha)) ).
 */
inline double armijo_rhs(const Matrix& factor, const Matrix& moved, const Matrix& grad,
                         const Matrix& dir, const ActiveSet& active, double alpha, double sigma) {
  const auto flags = active.flags(factor.cols());
  double free_part = 0.0;
  double active_part = 0.0;
  for (Index j = 0; j < factor.cols(); ++j)
    for (Index i = 0; i < factor.rows(); ++i) {
      if (flags(i, j))
        active_part += grad(i, j) * (factor(i, j) - moved(i, j));
      else
        free_part += grad(i, j) * dir(i, j);
    }
  return sigma * (alpha * free_part + active_part);
}

/**
 * Backtracks alpha = beta^m, m = 0..max_backtracks, along [X - alpha dir]_+
 * until f(X) - f(X(alpha)) >= armijo_rhs. `f` evaluates the objective as a
 * function of the moving factor only. On exhaustion accepted = false and
 * m_k = max_backtracks.
 */
template <class Objective>
ArmijoResult armijo_on_arc(Objective&& f, double f_current, const Matrix& factor,
                           const Matrix& grad, const Matrix& dir, const ActiveSet& active,
                           double beta, double sigma, int max_backtracks) {
  require(beta > 0.0 && beta < 1.0, ErrorKind::InvalidParameter, "beta must lie in (0,1)");
  ArmijoResult res;
  double alpha = 1.0;
  for (int m = 0; m <= max_backtracks; ++m, alpha *= beta) {
    Matrix moved = (factor - alpha * dir).cwiseMax(0.0);
    const double decrease = f_current - f(moved);
    const double rhs = armijo_rhs(factor, moved, grad, dir, active, alpha, sigma);
    res.m_k = m;
    res.alpha = alpha;
    res.decrease = decrease;
    res.rhs = rhs;
    res.candidate = std::move(moved);
    if (decrease >= rhs) {
      res.accepted = true;
      return res;
    }
  }
  res.accepted = false;
  return res;
}

/// Everything one projected half-step computed; handed to observers.
struct NmfHalfStep {
  Side side = Side::U;
  Matrix grad;
  Matrix h_tilde;
  ActiveSet active;
  Matrix direction;
  ArmijoResult armijo;
};

/**
 * One Armijo search for `side` at fp = (U, V): gradient and weights from fp,
 * objective evaluated with the other factor held fixed.
 */
inline ArmijoResult armijo_search(Side side, const Matrix& y, const FactorPair& fp,
                                  const WeightDiag& w, double lambda, const SolverConfig& cfg,
                                  NmfHalfStep* details = nullptr) {
  check_lambda(lambda);
  require(w.size() == fp.rank(), ErrorKind::InvalidInput, "weight size differs from factor rank");
  const Problem problem(ProblemKind::Nmf, y);
  problem.check_factors(fp);
  NmfHalfStep hs;
  hs.side = side;
  const Matrix& current = fp.factor(side);
  hs.grad = problem.residual_times_factor(side, fp);
  hs.grad.noalias() += lambda * (current * w.as_diagonal());
  hs.h_tilde = surrogate_block(side, fp, w, lambda);
  hs.active = active_set_rows(current, hs.grad, cfg.nmf.eps_active);
  hs.direction = newton_directions(hs.grad, hs.h_tilde, hs.active);

  FactorPair trial = fp;
  auto f = [&](const Matrix& moved) {
    trial.factor(side) = moved;
    return objective(problem, trial, lambda, cfg.eta);
  };
  const double f0 = objective(problem, fp, lambda, cfg.eta);
  const double beta = side == Side::U ? cfg.nmf.beta_u : cfg.nmf.beta_v;
  hs.armijo = armijo_on_arc(f, f0, current, hs.grad, hs.direction, hs.active, beta,
                            cfg.nmf.sigma, cfg.nmf.max_backtracks);
  ArmijoResult out = hs.armijo;
  if (details) *details = std::move(hs);
  return out;
}

/// Observer for every half-step: the iteration, the pair it started from, and what it did.
using NmfHalfStepObserver =
    std::function<void(int k, const FactorPair& before, const NmfHalfStep& step)>;

/**
 * Alternating projected Newton NMF. An exhausted line search leaves that
 * factor unchanged; two consecutive iterations in which both searches are
 * exhausted end the run.
 */
inline SolveResult solve_nmf(const Matrix& y, const SolverConfig& cfg,
                             const StepObserver& observer = {},
                             const NmfHalfStepObserver& half_observer = {},
                             std::optional<FactorPair> init = std::nullopt) {
  cfg.validate();
  const Problem problem(ProblemKind::Nmf, y);
  FactorPair start = init ? std::move(*init) : initial_factors(y, cfg.d_init, cfg.seed, true);
  problem.check_factors(start);

  auto step = [&](const FactorPair& fp, int k) {
    StepResult out;
    NmfHalfStep hu;
    armijo_search(Side::U, y, fp, weight_diag(fp, cfg.eta), cfg.lambda, cfg, &hu);
    if (half_observer) half_observer(k, fp, hu);
    FactorPair half(hu.armijo.accepted ? hu.armijo.candidate : fp.u, fp.v);

    NmfHalfStep hv;
    armijo_search(Side::V, y, half, weight_diag(half, cfg.eta), cfg.lambda, cfg, &hv);
    if (half_observer) half_observer(k, half, hv);
    out.next = FactorPair(half.u, hv.armijo.accepted ? hv.armijo.candidate : half.v);
    out.stalled = !hu.armijo.accepted && !hv.armijo.accepted;

    NmfStepData data{std::move(hu.grad), std::move(hv.grad), std::move(hu.active),
                     std::move(hv.active)};
    out.delta = proximity_delta_b(fp, out.next, data, cfg.lambda, cfg.eta).value;
    return out;
  };
  return detail::run_alternating(problem, cfg, std::move(start), step, observer, 2);
}

}  // namespace airls

#endif  // AIRLS_NMF_HPP
