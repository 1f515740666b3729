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

#ifndef AIRLS_PROXIMITY_HPP
#define AIRLS_PROXIMITY_HPP

/**
 * @file proximity.hpp
 * @brief Proximity measures between an iterate (U, V) and its successor
 *        (U*, V*), used as per-step lower bounds on objective decrease.
 */

#include "airls/active_set.hpp"
#include "airls/core.hpp"

namespace airls {

enum class ProximityKind { DeltaA, DeltaB };

struct ProximityMeasure {
  double value = 0.0;
  ProximityKind kind = ProximityKind::DeltaA;
};

namespace detail {

inline void check_same_shape(const FactorPair& a, const FactorPair& b) {
  require(a.u.rows() == b.u.rows() && a.u.cols() == b.u.cols() && a.v.rows() == b.v.rows() &&
              a.v.cols() == b.v.cols(),
          ErrorKind::InvalidInput, "proximity needs factor pairs of identical shape");
}

/// lambda/2 (||D_(U,V)^1/2 (U-U*)^T||^2 + ||D_(U*,V)^1/2 (V-V*)^T||^2)
inline double weighted_displacement(const FactorPair& prev, const FactorPair& next, double lambda,
                                    double eta) {
  if (prev.rank() == 0) return 0.0;
  const WeightDiag d_u = weight_diag(prev, eta);
  const WeightDiag d_v = weight_diag(FactorPair(next.u, prev.v), eta);
  const Vector du = (prev.u - next.u).colwise().squaredNorm().transpose();
  const Vector dv = (prev.v - next.v).colwise().squaredNorm().transpose();
  return 0.5 * lambda * (d_u.entries.dot(du) + d_v.entries.dot(dv));
}

/// sum_i x_i^T [G]_{I_i} x_i over the rows x_i of `diff`.
inline double partial_quadratic(const Matrix& diff, const Matrix& gram, const ActiveSet& active) {
  double total = 0.0;
  for (Index i = 0; i < diff.rows(); ++i) {
    const auto& set = active.rows.empty() ? std::vector<Index>{}
                                          : active.rows[static_cast<std::size_t>(i)];
    const Vector x = diff.row(i).transpose();
    if (set.empty())
      total += x.dot(gram * x);
    else
      total += x.dot(partial_diag_block(gram, set) * x);
  }
  return total;
}

}  // namespace detail

/**
 * 1/2 (||V (U - U*)^T||^2 + ||U* (V - V*)^T||^2)
 *   + lambda/2 (||D_(U,V)^1/2 (U - U*)^T||^2 + ||D_(U*,V)^1/2 (V - V*)^T||^2)
 */
inline ProximityMeasure proximity_delta_a(const FactorPair& prev, const FactorPair& next,
                                          double lambda, double eta) {
  detail::check_same_shape(prev, next);
  if (prev.rank() == 0) return {0.0, ProximityKind::DeltaA};
  const Matrix du = prev.u - next.u;
  const Matrix dv = prev.v - next.v;
  // ||V dU^T||^2 = tr(dU (V^T V) dU^T)
  const double quad_u = (du * (prev.v.transpose() * prev.v)).cwiseProduct(du).sum();
  const double quad_v = (dv * (next.u.transpose() * next.u)).cwiseProduct(dv).sum();
  const double value =
      0.5 * (quad_u + quad_v) + detail::weighted_displacement(prev, next, lambda, eta);
  return {value, ProximityKind::DeltaA};
}

/// Gradients and active sets of the NMF step that produced `next` from `prev`.
struct NmfStepData {
  Matrix grad_u;  // grad_U f(U, V)
  Matrix grad_v;  // grad_V f(U*, V)
  ActiveSet active_u;
  ActiveSet active_v;
};

/**
 * 1/2 sum_i (u_i - u*_i)^T [V^T V]_{I_ui} (u_i - u*_i)
 *   + 1/2 sum_i (v_i - v*_i)^T [U*^T U*]_{I_vi} (v_i - v*_i)
 *   + lambda/2 (||D_(U,V)^1/2 (U - U*)^T||^2 + ||D_(U*,V)^1/2 (V - V*)^T||^2)
 *   + tr((U - U*)^T grad_U f(U, V)) + tr((V - V*)^T grad_V f(U*, V))
 *
 * Row vectors u_i here are rows of U, matching the row-wise active sets.
 */
inline ProximityMeasure proximity_delta_b(const FactorPair& prev, const FactorPair& next,
                                          const NmfStepData& step, double lambda, double eta) {
  detail::check_same_shape(prev, next);
  if (prev.rank() == 0) return {0.0, ProximityKind::DeltaB};
  require(step.grad_u.rows() == prev.u.rows() && step.grad_u.cols() == prev.u.cols() &&
              step.grad_v.rows() == prev.v.rows() && step.grad_v.cols() == prev.v.cols(),
          ErrorKind::InvalidInput, "gradient shapes do not match the factors");
  const Matrix du = prev.u - next.u;
  const Matrix dv = prev.v - next.v;
  const double quad_u =
      detail::partial_quadratic(du, prev.v.transpose() * prev.v, step.active_u);
  const double quad_v =
      detail::partial_quadratic(dv, next.u.transpose() * next.u, step.active_v);
  const double traces = du.cwiseProduct(step.grad_u).sum() + dv.cwiseProduct(step.grad_v).sum();
  const double value = 0.5 * (quad_u + quad_v) +
                       detail::weighted_displacement(prev, next, lambda, eta) + traces;
  return {value, ProximityKind::DeltaB};
}

}  // namespace airls

#endif  // AIRLS_PROXIMITY_HPP
