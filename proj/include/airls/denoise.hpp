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

#ifndef AIRLS_DENOISE_HPP
#define AIRLS_DENOISE_HPP

/**
 * @file denoise.hpp
 * @brief Alternating iteratively reweighted least squares for
 *        1/2 ||Y - U V^T||_F^2 + lambda * sum_i sqrt(||u_i||^2 + ||v_i||^2 + eta^2).
 *
 * Each half-step minimizes a quadratic upper bound of the objective whose
 * Hessian is block diagonal with d x d blocks  F^T F + lambda D, F being the
 * factor held fixed. The minimizer is closed form:
 *
 *   U+ = Y V (V^T V + lambda D_(U,V))^{-1}
 *   V+ = Y^T U+ (U+^T U+ + lambda D_(U+,V))^{-1}
 */

#include "airls/core.hpp"
#include "airls/proximity.hpp"
#include "airls/solver_common.hpp"

#include <Eigen/Cholesky>

namespace airls {

/// F^T F + lambda D, the d x d block of the surrogate Hessian for `side`.
inline Matrix surrogate_block(Side side, const FactorPair& fp, const WeightDiag& w, double lambda) {
  const Matrix& fixed = side == Side::U ? fp.v : fp.u;
  Matrix h = fixed.transpose() * fixed;
  h.diagonal() += lambda * w.entries;
  return h;
}

/// Returns B H^{-1} for symmetric positive-definite H, via Cholesky.
inline Matrix solve_right_spd(const Matrix& b, const Matrix& h) {
  Eigen::LLT<Matrix> llt(h);
  require(llt.info() == Eigen::Success, ErrorKind::InvalidInput,
          "surrogate block is not positive definite");
  return llt.solve(b.transpose()).transpose();
}

inline Matrix update_factor_denoise(Side side, const Matrix& y, const FactorPair& fp,
                                    const WeightDiag& w, double lambda) {
  check_lambda(lambda);
  require(fp.rank() >= 1, ErrorKind::InvalidInput, "update needs d >= 1");
  require(w.size() == fp.rank(), ErrorKind::InvalidInput, "weight size differs from factor rank");
  require(fp.rows() == y.rows() && fp.cols() == y.cols(), ErrorKind::InvalidInput,
          "factor dimensions do not match Y");
  const Matrix h = surrogate_block(side, fp, w, lambda);
  const Matrix rhs = side == Side::U ? Matrix(y * fp.v) : Matrix(y.transpose() * fp.u);
  return solve_right_spd(rhs, h);
}

/**
 * Runs the alternating scheme from the seeded initialization until the
 * relative change of U V^T drops below cfg.tol, cfg.max_iter is reached, or
 * every column has been pruned.
 */
inline SolveResult solve_denoise(const Matrix& y, const SolverConfig& cfg,
                                 const StepObserver& observer = {},
                                 std::optional<FactorPair> init = std::nullopt) {
  cfg.validate();
  const Problem problem(ProblemKind::Denoise, y);
  FactorPair start = init ? std::move(*init) : initial_factors(y, cfg.d_init, cfg.seed);
  problem.check_factors(start);

  auto step = [&](const FactorPair& fp, int) {
    StepResult out;
    const WeightDiag w_u = weight_diag(fp, cfg.eta);
    Matrix u_next = update_factor_denoise(Side::U, y, fp, w_u, cfg.lambda);
    FactorPair half(std::move(u_next), fp.v);
    const WeightDiag w_v = weight_diag(half, cfg.eta);
    Matrix v_next = update_factor_denoise(Side::V, y, half, w_v, cfg.lambda);
    out.next = FactorPair(std::move(half.u), std::move(v_next));
    out.delta = proximity_delta_a(fp, out.next, cfg.lambda, cfg.eta).value;
    return out;
  };
  return detail::run_alternating(problem, cfg, std::move(start), step, observer);
}

}  // namespace airls

#endif  // AIRLS_DENOISE_HPP
