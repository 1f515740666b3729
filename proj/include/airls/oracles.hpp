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

#ifndef AIRLS_ORACLES_HPP
#define AIRLS_ORACLES_HPP

/**
 * @file oracles.hpp
 * @brief Brute-force dense objects for checking the solvers on small
 *        instances: exact Hessians, majorization gaps, step-size bounds,
 *        rate bounds and the nuclear-norm bound.
 *
 * Hessians are taken with respect to one factor with the other held fixed,
 * vectorized row-wise: coordinate (i, p) of an r x d factor maps to i * d + p.
 */

#include "airls/active_set.hpp"
#include "airls/core.hpp"
#include "airls/solver_common.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace airls {

/// Largest r * d for which dense factor Hessians are built.
inline constexpr Index kOracleSizeGuard = 2000;
/// Largest m * n for the nuclear-norm SVD.
inline constexpr Index kSvdSizeGuard = 250000;

struct ExactHessian {
  Matrix h;
  ProblemKind kind = ProblemKind::Denoise;
  Side side = Side::U;
};

namespace detail {

inline void check_oracle_size(const FactorPair& fp, Side side) {
  const Index r = fp.factor(side).rows();
  require(r * fp.rank() <= kOracleSizeGuard, ErrorKind::SizeGuard,
          "oracle size guard: rows * d exceeds " + std::to_string(kOracleSizeGuard));
  require(fp.rank() >= 1, ErrorKind::InvalidInput, "oracle needs d >= 1");
}

/// (Other factor)^T Phi (other factor) for row `i` of the moving factor.
inline Matrix data_block(const Problem& problem, Side side, const FactorPair& fp, Index i) {
  const Matrix& other = side == Side::U ? fp.v : fp.u;
  const ObservedMask* mask = problem.mask();
  if (mask == nullptr) return other.transpose() * other;
  Matrix b = Matrix::Zero(fp.rank(), fp.rank());
  for (Index j = 0; j < other.rows(); ++j) {
    const bool seen = side == Side::U ? mask->contains(i, j) : mask->contains(j, i);
    if (seen) b.noalias() += other.row(j).transpose() * other.row(j);
  }
  return b;
}

inline double min_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double max_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.rows() - 1);
}

}  // namespace detail

/**
 * Hessian of the eta-smoothed objective in the factor `side`. The data part is
 * block diagonal with blocks F^T Phi_i F; the regularizer couples rows with
 *   K_ii = lambda diag((s_p^2 - x_ip^2) / s_p^3),  K_ij = lambda diag(-x_ip x_jp / s_p^3),
 * s_p = sqrt(||u_p||^2 + ||v_p||^2 + eta^2).
 */
inline ExactHessian exact_hessian(const Problem& problem, Side side, const FactorPair& fp,
                                  double lambda, double eta) {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::InvalidParameter,
          "lambda must be nonnegative");
  require(eta >= 0.0, ErrorKind::InvalidParameter, "eta must be nonnegative");
  require(fp.rows() == problem.rows() && fp.cols() == problem.cols(), ErrorKind::InvalidInput,
          "factor dimensions do not match Y");
  detail::check_oracle_size(fp, side);
  const Matrix& x = fp.factor(side);
  const Index r = x.rows();
  const Index d = fp.rank();
  const Vector s = (column_pair_sq_norms(fp).array() + eta * eta).sqrt().matrix();
  require((s.array() > 0.0).all(), ErrorKind::InvalidInput,
          "regularizer is not twice differentiable at a zero column with eta = 0");

  ExactHessian out;
  out.kind = problem.kind();
  out.side = side;
  out.h = Matrix::Zero(r * d, r * d);
  for (Index i = 0; i < r; ++i)
    out.h.block(i * d, i * d, d, d) = detail::data_block(problem, side, fp, i);
  if (lambda == 0.0) return out;
  for (Index p = 0; p < d; ++p) {
    const double s3 = s[p] * s[p] * s[p];
    for (Index i = 0; i < r; ++i) {
      out.h(i * d + p, i * d + p) += lambda / s[p];
      for (Index j = 0; j < r; ++j) out.h(i * d + p, j * d + p) -= lambda * x(i, p) * x(j, p) / s3;
    }
  }
  return out;
}

inline ExactHessian exact_hessian(ProblemKind kind, Side side, const Matrix& y,
                                  const ObservedMask* mask, const FactorPair& fp, double lambda,
                                  double eta) {
  const Problem problem(kind, y, mask);
  return exact_hessian(problem, side, fp, lambda, eta);
}

/**
 * Block-diagonal surrogate Hessian with the block F^T F + lambda D repeated per
 * row; with `active`, row i uses its partially diagonalized version.
 */
inline Matrix surrogate_hessian(Side side, const FactorPair& fp, double lambda, double eta,
                                const ActiveSet* active = nullptr) {
  detail::check_oracle_size(fp, side);
  const Matrix& fixed = side == Side::U ? fp.v : fp.u;
  Matrix block = fixed.transpose() * fixed;
  block.diagonal() += lambda * weight_diag(fp, eta).entries;
  const Index r = fp.factor(side).rows();
  const Index d = fp.rank();
  Matrix h = Matrix::Zero(r * d, r * d);
  for (Index i = 0; i < r; ++i) {
    if (active && !active->rows.empty() && !active->rows[static_cast<std::size_t>(i)].empty())
      h.block(i * d, i * d, d, d) =
          partial_diag_block(block, active->rows[static_cast<std::size_t>(i)]);
    else
      h.block(i * d, i * d, d, d) = block;
  }
  return h;
}

/// Smallest eigenvalue of (surrogate Hessian) - (exact Hessian).
inline double psd_gap(const Problem& problem, Side side, const FactorPair& fp, double lambda,
                      double eta) {
  const ExactHessian exact = exact_hessian(problem, side, fp, lambda, eta);
  const Matrix gap = surrogate_hessian(side, fp, lambda, eta) - exact.h;
  return detail::min_eig(0.5 * (gap + gap.transpose()));
}

inline double psd_gap(ProblemKind kind, Side side, const Matrix& y, const ObservedMask* mask,
                      const FactorPair& fp, double lambda, double eta) {
  const Problem problem(kind, y, mask);
  return psd_gap(problem, side, fp, lambda, eta);
}

/**
 * Quadratic model around fp in the factor `side`, evaluated at `point`:
 *   f(fp) + <point - X, grad> + 1/(2 alpha) sum_i (x_i - x'_i)^T Hbar_i (x_i - x'_i).
 * Hbar_i is F^T F + lambda D, partially diagonalized on active->rows[i] when given.
 */
inline double surrogate_value(const Problem& problem, Side side, const FactorPair& fp,
                              double lambda, double eta, const Matrix& point,
                              const ActiveSet* active = nullptr, double alpha = 1.0) {
  require(alpha > 0.0, ErrorKind::InvalidParameter, "alpha must be positive");
  const Matrix& x = fp.factor(side);
  require(point.rows() == x.rows() && point.cols() == x.cols(), ErrorKind::InvalidInput,
          "point has the wrong shape");
  const Matrix& fixed = side == Side::U ? fp.v : fp.u;
  Matrix block = fixed.transpose() * fixed;
  block.diagonal() += lambda * weight_diag(fp, eta).entries;
  const Matrix diff = point - x;
  const Matrix grad = gradient(problem, side, fp, lambda, eta);
  double quad = 0.0;
  for (Index i = 0; i < diff.rows(); ++i) {
    const Vector di = diff.row(i).transpose();
    const bool partial =
        active && !active->rows.empty() && !active->rows[static_cast<std::size_t>(i)].empty();
    quad += partial ? di.dot(partial_diag_block(block, active->rows[static_cast<std::size_t>(i)]) * di)
                    : di.dot(block * di);
  }
  return objective(problem, fp, lambda, eta) + diff.cwiseProduct(grad).sum() + quad / (2.0 * alpha);
}

/// surrogate_value(point) - f(point with `side` replaced).
inline double surrogate_gap(const Problem& problem, Side side, const FactorPair& fp, double lambda,
                            double eta, const Matrix& point, const ActiveSet* active = nullptr,
                            double alpha = 1.0) {
  FactorPair moved = fp;
  (side == Side::U ? moved.u : moved.v) = point;
  return surrogate_value(problem, side, fp, lambda, eta, point, active, alpha) -
         objective(problem, moved, lambda, eta);
}

/// lambda_min(partially diagonalized surrogate Hessian) / lambda_max(exact Hessian).
inline double nmf_alpha_bound(const Problem& problem, Side side, const FactorPair& fp,
                              double lambda, double eta, const ActiveSet& active) {
  const Matrix hbar = surrogate_hessian(side, fp, lambda, eta, &active);
  const ExactHessian exact = exact_hessian(problem, side, fp, lambda, eta);
  const double top = detail::max_eig(exact.h);
  require(top > 0.0, ErrorKind::InvalidInput, "exact Hessian has no positive eigenvalue");
  return detail::min_eig(hbar) / top;
}

// ---------------------------------------------------------------------------
// Rate bounds over a finished trace
// ---------------------------------------------------------------------------

struct RateBoundReport {
  int iterations = 0;
  double min_delta = 0.0;
  double average_decrease = 0.0;  // (f_0 - f_K) / K
  bool sublinear_holds = false;
  double sublinear_slack = 0.0;   // average_decrease - min_delta

  double l_low = 0.0;             // smallest Gram eigenvalue over the run
  double tau = 0.0;               // largest column squared norm over the run
  double d_low = 0.0;             // lower bound on every weight entry
  bool precondition = false;      // d_low >= 1 / (2 tau)
  double min_step_sq = 0.0;
  double displacement_bound = 0.0;  // 4 tau / (2 l tau + lambda) * average_decrease
  bool displacement_holds = false;
  double displacement_slack = 0.0;
  /// Same bound with the measured weight floor instead of 1/(2 tau).
  double displacement_bound_measured = 0.0;
};

/**
 * Checks min_k delta_k <= (f_0 - f_K)/K, f_0 the starting objective and
 * delta_k the proximity of step k-1 -> k, and the displacement rate
 * min_k ||dU||^2 + ||dV||^2 <= 4 tau / (2 l tau + lambda) (f_0 - f_K)/K.
 */
inline RateBoundReport rate_bound_check(const IterationTrace& trace, double lambda, double eta,
                                        double tol = 1e-9) {
  require(!trace.iterations.empty(), ErrorKind::InvalidInput, "trace has no iterations");
  RateBoundReport r;
  const auto k = static_cast<double>(trace.iterations.size());
  r.iterations = trace.num_iterations();
  r.min_delta = std::numeric_limits<double>::infinity();
  r.min_step_sq = std::numeric_limits<double>::infinity();
  r.l_low = std::numeric_limits<double>::infinity();
  for (const IterationRecord& rec : trace.iterations) {
    require(std::isfinite(rec.delta), ErrorKind::InvalidInput, "trace is missing proximity values");
    r.min_delta = std::min(r.min_delta, rec.delta);
    r.min_step_sq = std::min(r.min_step_sq, rec.step_sq);
    r.l_low = std::min(r.l_low, rec.gram_min_eig);
    r.tau = std::max(r.tau, rec.tau);
  }
  r.l_low = std::max(r.l_low, 0.0);
  r.average_decrease = (trace.initial_objective - trace.final_objective()) / k;
  r.sublinear_slack = r.average_decrease - r.min_delta;
  r.sublinear_holds = r.sublinear_slack >= -tol;

  // Every pair norm squared is at most 2 tau.
  r.d_low = 1.0 / std::sqrt(2.0 * r.tau + eta * eta);
  r.precondition = r.tau > 0.0 && r.d_low >= 1.0 / (2.0 * r.tau);
  r.displacement_bound =
      r.tau > 0.0 ? 4.0 * r.tau / (2.0 * r.l_low * r.tau + lambda) * r.average_decrease
                  : std::numeric_limits<double>::infinity();
  r.displacement_slack = r.displacement_bound - r.min_step_sq;
  r.displacement_holds = r.displacement_slack >= -tol;
  r.displacement_bound_measured = 2.0 * r.average_decrease / (r.l_low + lambda * r.d_low);
  return r;
}

// ---------------------------------------------------------------------------
// Nuclear norm bound
// ---------------------------------------------------------------------------

struct NuclearBound {
  double nuclear = 0.0;  // ||U V^T||_*
  double frobenius_half = 0.0;  // (||U||_F^2 + ||V||_F^2) / 2
};

inline NuclearBound nuclear_bound_check(const FactorPair& fp) {
  require(fp.rows() * fp.cols() <= kSvdSizeGuard, ErrorKind::SizeGuard,
          "oracle size guard: m * n exceeds " + std::to_string(kSvdSizeGuard));
  NuclearBound out;
  out.frobenius_half = 0.5 * (fp.u.squaredNorm() + fp.v.squaredNorm());
  if (fp.rank() == 0 || fp.rows() == 0 || fp.cols() == 0) return out;
  Eigen::BDCSVD<Matrix> svd(fp.product());
  out.nuclear = svd.singularValues().sum();
  return out;
}

}  // namespace airls

#endif  // AIRLS_ORACLES_HPP
