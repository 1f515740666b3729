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

#ifndef AIRLS_ACTIVE_SET_HPP
#define AIRLS_ACTIVE_SET_HPP

/**
 * @file active_set.hpp
 * @brief Active nonnegativity constraints and partially diagonalized blocks.
 */

#include "airls/core.hpp"

#include <vector>

namespace airls {

/// For each row of a factor, the coordinates held at the zero bound.
struct ActiveSet {
  std::vector<std::vector<Index>> rows;
  double eps_k = 0.0;  // the threshold the set was built with

  bool empty() const {
    for (const auto& r : rows)
      if (!r.empty()) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (const auto& r : rows) c += r.size();
    return c;
  }
  /// Dense 0/1 flags, same shape as the factor.
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> flags(Index cols) const {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> f =
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            static_cast<Index>(rows.size()), cols, false);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (Index j : rows[i]) f(static_cast<Index>(i), j) = true;
    return f;
  }
};

/**
 * Row-wise sets {j : 0 <= x_ij <= eps_k, g_ij > 0} with
 * eps_k = min(eps, ||X - G||_F^2).
 */
inline ActiveSet active_set_rows(const Matrix& factor, const Matrix& grad, double eps) {
  require(factor.rows() == grad.rows() && factor.cols() == grad.cols(), ErrorKind::InvalidInput,
          "factor and gradient shapes differ");
  require(eps > 0.0, ErrorKind::InvalidParameter, "eps must be positive");
  ActiveSet set;
  set.eps_k = std::min(eps, (factor - grad).squaredNorm());
  set.rows.resize(static_cast<std::size_t>(factor.rows()));
  for (Index i = 0; i < factor.rows(); ++i)
    for (Index j = 0; j < factor.cols(); ++j) {
      const double x = factor(i, j);
      if (x >= 0.0 && x <= set.eps_k && grad(i, j) > 0.0)
        set.rows[static_cast<std::size_t>(i)].push_back(j);
    }
  return set;
}

/// Zeroes off-diagonal (p, l) whenever p or l belongs to `rowset`.
inline Matrix partial_diag_block(const Matrix& h, const std::vector<Index>& rowset) {
  require(h.rows() == h.cols(), ErrorKind::InvalidInput, "block must be square");
  Matrix out = h;
  for (Index p : rowset) {
    require(p >= 0 && p < h.rows(), ErrorKind::InvalidInput, "active index out of range");
    const double diag = out(p, p);
    out.row(p).setZero();
    out.col(p).setZero();
    out(p, p) = diag;
  }
  return out;
}

}  // namespace airls

#endif  // AIRLS_ACTIVE_SET_HPP
