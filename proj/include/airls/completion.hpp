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

#ifndef AIRLS_COMPLETION_HPP
#define AIRLS_COMPLETION_HPP

/**
 * @file completion.hpp
 * @brief Reweighted matrix completion on an observed set Omega.
 *
 * The surrogate keeps the unmasked block F^T F + lambda D, so a half-step is
 * a quasi-Newton move with an O(d^3) solve:
 *
 *   U+ = U - (P(U V^T - Y) V + lambda U D) (V^T V + lambda D)^{-1}
 *
 * and symmetrically for V with U+. Only observed entries of Y are touched.
 */

#include "airls/core.hpp"
#include "airls/denoise.hpp"
#include "airls/proximity.hpp"
#include "airls/solver_common.hpp"

namespace airls {

inline Matrix update_factor_mc(Side side, const Matrix& y, const ObservedMask& mask,
                               const FactorPair& fp, const WeightDiag& w, double lambda,
                               ResidualPath path = ResidualPath::Auto) {
  check_lambda(lambda);
  require(fp.rank() >= 1, ErrorKind::InvalidInput, "update needs d >= 1");
  require(w.size() == fp.rank(), ErrorKind::InvalidInput, "weight size differs from factor rank");
  require(mask.rows() == y.rows() && mask.cols() == y.cols(), ErrorKind::InvalidInput,
          "mask dimensions differ from Y");
  require(fp.rows() == y.rows() && fp.cols() == y.cols(), ErrorKind::InvalidInput,
          "factor dimensions do not match Y");
  const Matrix& current = fp.factor(side);
  Matrix grad = masked_residual_times_factor(side, y, mask, fp, path);
  grad.noalias() += lambda * (current * w.as_diagonal());
  return current - solve_right_spd(grad, surrogate_block(side, fp, w, lambda));
}

inline SolveResult solve_mc(const Matrix& y, const ObservedMask& mask, const SolverConfig& cfg,
                            const StepObserver& observer = {},
                            std::optional<FactorPair> init = std::nullopt) {
  cfg.validate();
  const Problem problem(ProblemKind::Complete, y, &mask);
  // Observed energy rescaled by the sampling density estimates ||Y||_F.
  FactorPair start =
      init ? std::move(*init)
           : initial_factors(apply_mask(y, mask) / std::sqrt(mask.density()), cfg.d_init, cfg.seed);
  problem.check_factors(start);

  auto step = [&](const FactorPair& fp, int) {
    StepResult out;
    const WeightDiag w_u = weight_diag(fp, cfg.eta);
    Matrix u_next = update_factor_mc(Side::U, y, mask, fp, w_u, cfg.lambda);
    FactorPair half(std::move(u_next), fp.v);
    const WeightDiag w_v = weight_diag(half, cfg.eta);
    Matrix v_next = update_factor_mc(Side::V, y, mask, half, w_v, cfg.lambda);
    out.next = FactorPair(std::move(half.u), std::move(v_next));
    out.delta = proximity_delta_a(fp, out.next, cfg.lambda, cfg.eta).value;
    return out;
  };
  return detail::run_alternating(problem, cfg, std::move(start), step, observer);
}

}  // namespace airls

#endif  // AIRLS_COMPLETION_HPP
