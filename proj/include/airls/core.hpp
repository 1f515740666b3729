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

#ifndef AIRLS_CORE_HPP
#define AIRLS_CORE_HPP

/**
 * @file core.hpp
 * @brief Domain types, the coupled column-pair regularizer, objectives,
 *        gradients and the evaluation metrics shared by every solver.
 *
 * The objective handled everywhere is
 *
 *   f(U, V) = 1/2 ||P(Y - U V^T)||_F^2 + lambda * sum_i sqrt(||u_i||^2 + ||v_i||^2 + eta^2)
 *
 * where P is the identity (denoising, NMF) or the sampling operator of an
 * ObservedMask (completion), and u_i, v_i are the i-th columns of U and V.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace airls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorKind {
  InvalidParameter,
  InvalidInput,
  ConstraintViolation,
  ParseError,
  SizeGuard,
  IoError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::ConstraintViolation: return "constraint-violation";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::SizeGuard: return "size-guard";
    case ErrorKind::IoError: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Validates a data matrix: nonempty and finite.
inline void check_data_matrix(const Matrix& m, const char* name) {
  require(m.rows() > 0 && m.cols() > 0, ErrorKind::InvalidInput,
          std::string(name) + " must have positive dimensions");
  require(m.allFinite(), ErrorKind::InvalidInput, std::string(name) + " has non-finite entries");
}

/// Random streams. A (seed, stream) pair picks an independent generator, so
/// equal seeds used for different purposes never share draws.
enum class RngStream : std::uint32_t { Factors = 1, Noise = 2, Mask = 3, Init = 4 };

inline std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

enum class Side { U, V };

inline const char* to_string(Side side) { return side == Side::U ? "U" : "V"; }

enum class ProblemKind { Denoise, Complete, Nmf };

inline const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Denoise: return "denoise";
    case ProblemKind::Complete: return "complete";
    case ProblemKind::Nmf: return "nmf";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// ObservedMask
// ---------------------------------------------------------------------------

struct Entry {
  Index row = 0;
  Index col = 0;

  friend auto operator<=>(const Entry&, const Entry&) = default;
};

/**
 * The set of observed (row, col) positions of an m x n matrix.
 *
 * Entries are kept sorted in row-major order; duplicates and out-of-range
 * indices are rejected at construction, and the set is never empty.
 */
class ObservedMask {
 public:
  ObservedMask(Index rows, Index cols, std::vector<Entry> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    require(rows_ > 0 && cols_ > 0, ErrorKind::InvalidInput, "mask dimensions must be positive");
    require(!entries_.empty(), ErrorKind::InvalidInput, "mask must contain at least one entry");
    std::sort(entries_.begin(), entries_.end());
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const Entry& e = entries_[k];
      require(e.row >= 0 && e.row < rows_ && e.col >= 0 && e.col < cols_, ErrorKind::InvalidInput,
              "mask entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                  ") out of range");
      require(k == 0 || entries_[k - 1] != e, ErrorKind::InvalidInput,
              "duplicate mask entry (" + std::to_string(e.row) + "," + std::to_string(e.col) + ")");
    }
  }

  static ObservedMask full(Index rows, Index cols) {
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(rows * cols));
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) entries.push_back({i, j});
    return ObservedMask(rows, cols, std::move(entries));
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  double density() const noexcept {
    return static_cast<double>(entries_.size()) / (static_cast<double>(rows_) * static_cast<double>(cols_));
  }

  bool is_full() const noexcept {
    return static_cast<Index>(entries_.size()) == rows_ * cols_;
  }

  bool contains(Index row, Index col) const {
    return std::binary_search(entries_.begin(), entries_.end(), Entry{row, col});
  }

  /// 0/1 indicator matrix of the observed set.
  Matrix indicator() const {
    Matrix m = Matrix::Zero(rows_, cols_);
    for (const Entry& e : entries_) m(e.row, e.col) = 1.0;
    return m;
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Factors and weights
// ---------------------------------------------------------------------------

/// U (m x d) and V (n x d). d = 0 is the degenerate all-pruned state.
struct FactorPair {
  Matrix u;
  Matrix v;

  FactorPair() = default;
  FactorPair(Matrix u_in, Matrix v_in) : u(std::move(u_in)), v(std::move(v_in)) {
    require(u.cols() == v.cols(), ErrorKind::InvalidInput,
            "factor inner dimensions differ: " + std::to_string(u.cols()) + " vs " +
                std::to_string(v.cols()));
  }

  Index rank() const noexcept { return u.cols(); }
  Index rows() const noexcept { return u.rows(); }
  Index cols() const noexcept { return v.rows(); }

  const Matrix& factor(Side side) const noexcept { return side == Side::U ? u : v; }
  Matrix& factor(Side side) noexcept { return side == Side::U ? u : v; }

  /// U V^T; an m x n zero matrix when d = 0.
  Matrix product() const {
    if (rank() == 0) return Matrix::Zero(rows(), cols());
    return u * v.transpose();
  }
};

/// The diagonal of D_(U,V): entry i = 1 / sqrt(||u_i||^2 + ||v_i||^2 + eta^2).
struct WeightDiag {
  Vector entries;

  Index size() const noexcept { return entries.size(); }
  double operator[](Index i) const { return entries[i]; }
  auto as_diagonal() const { return entries.asDiagonal(); }
};

/// Squared pair norms ||u_i||^2 + ||v_i||^2, one per column.
inline Vector column_pair_sq_norms(const FactorPair& fp) {
  if (fp.rank() == 0) return Vector(0);
  return (fp.u.colwise().squaredNorm() + fp.v.colwise().squaredNorm()).transpose();
}

inline Vector column_pair_norms(const FactorPair& fp) {
  return column_pair_sq_norms(fp).cwiseSqrt();
}

inline WeightDiag weight_diag(const FactorPair& fp, double eta) {
  require(eta > 0.0 && std::isfinite(eta), ErrorKind::InvalidParameter, "eta must be positive");
  const Vector sq = column_pair_sq_norms(fp);
  WeightDiag w;
  w.entries = (sq.array() + eta * eta).sqrt().inverse().matrix();
  return w;
}

/// sum_i sqrt(||u_i||^2 + ||v_i||^2 + eta^2); eta = 0 gives the plain l1/l2 norm.
inline double smoothed_regularizer(const FactorPair& fp, double eta) {
  require(eta >= 0.0 && std::isfinite(eta), ErrorKind::InvalidParameter,
          "eta must be nonnegative");
  const Vector sq = column_pair_sq_norms(fp);
  return (sq.array() + eta * eta).sqrt().sum();
}

// ---------------------------------------------------------------------------
// Sampling operator and masked residuals
// ---------------------------------------------------------------------------

inline Matrix apply_mask(const Matrix& m, const ObservedMask& mask) {
  require(m.rows() == mask.rows() && m.cols() == mask.cols(), ErrorKind::InvalidInput,
          "matrix and mask dimensions differ");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (const Entry& e : mask.entries()) out(e.row, e.col) = m(e.row, e.col);
  return out;
}

/// How P_Omega(U V^T - Y) is materialized.
enum class ResidualPath { Auto, Sparse, Dense };

/// Density below which the masked residual is traversed entry by entry.
inline constexpr double kSparseResidualDensity = 0.25;

namespace detail {

inline bool use_sparse(const ObservedMask& mask, ResidualPath path) {
  if (path == ResidualPath::Sparse) return true;
  if (path == ResidualPath::Dense) return false;
  return mask.density() < kSparseResidualDensity;
}

/// Residual values [U V^T - Y]_ij at the observed entries, in mask order.
inline Vector observed_residuals(const Matrix& y, const ObservedMask& mask, const FactorPair& fp) {
  const auto& entries = mask.entries();
  Vector r(static_cast<Index>(entries.size()));
  const Index d = fp.rank();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    double x = 0.0;
    for (Index p = 0; p < d; ++p) x += fp.u(e.row, p) * fp.v(e.col, p);
    r[static_cast<Index>(k)] = x - y(e.row, e.col);
  }
  return r;
}

/// Dense P_Omega(U V^T - Y). Unobserved entries of Y are never read.
inline Matrix dense_masked_residual(const Matrix& y, const ObservedMask& mask, const FactorPair& fp) {
  const Matrix x = fp.product();
  Matrix r = Matrix::Zero(y.rows(), y.cols());
  for (const Entry& e : mask.entries()) r(e.row, e.col) = x(e.row, e.col) - y(e.row, e.col);
  return r;
}

}  // namespace detail

/// ||P_Omega(Y - U V^T)||_F^2.
inline double masked_residual_sq_norm(const Matrix& y, const ObservedMask& mask,
                                      const FactorPair& fp, ResidualPath path = ResidualPath::Auto) {
  if (detail::use_sparse(mask, path)) return detail::observed_residuals(y, mask, fp).squaredNorm();
  return detail::dense_masked_residual(y, mask, fp).squaredNorm();
}

/**
 * P_Omega(U V^T - Y) V (side U) or P_Omega(U V^T - Y)^T U (side V).
 */
inline Matrix masked_residual_times_factor(Side side, const Matrix& y, const ObservedMask& mask,
                                           const FactorPair& fp,
                                           ResidualPath path = ResidualPath::Auto) {
  const Index d = fp.rank();
  if (detail::use_sparse(mask, path)) {
    const Vector r = detail::observed_residuals(y, mask, fp);
    const auto& entries = mask.entries();
    if (side == Side::U) {
      Matrix g = Matrix::Zero(fp.rows(), d);
      for (std::size_t k = 0; k < entries.size(); ++k)
        g.row(entries[k].row) += r[static_cast<Index>(k)] * fp.v.row(entries[k].col);
      return g;
    }
    Matrix g = Matrix::Zero(fp.cols(), d);
    for (std::size_t k = 0; k < entries.size(); ++k)
      g.row(entries[k].col) += r[static_cast<Index>(k)] * fp.u.row(entries[k].row);
    return g;
  }
  const Matrix r = detail::dense_masked_residual(y, mask, fp);
  if (d == 0) return Matrix::Zero(side == Side::U ? fp.rows() : fp.cols(), 0);
  return side == Side::U ? Matrix(r * fp.v) : Matrix(r.transpose() * fp.u);
}

// ---------------------------------------------------------------------------
// Problems, objective and gradient
// ---------------------------------------------------------------------------

/**
 * A non-owning view of the data term: kind, data matrix and (for completion)
 * the observed set. Validates the kind-specific preconditions once.
 */
class Problem {
 public:
  Problem(ProblemKind kind, const Matrix& y, const ObservedMask* mask = nullptr)
      : kind_(kind), y_(&y), mask_(mask) {
    check_data_matrix(y, "Y");
    if (kind == ProblemKind::Complete) {
      require(mask != nullptr, ErrorKind::InvalidInput, "completion requires an observed mask");
      require(mask->rows() == y.rows() && mask->cols() == y.cols(), ErrorKind::InvalidInput,
              "mask dimensions differ from Y");
    }
    if (kind == ProblemKind::Nmf)
      require((y.array() >= 0.0).all(), ErrorKind::ConstraintViolation,
              "nonnegative factorization requires Y >= 0");
  }

  ProblemKind kind() const noexcept { return kind_; }
  const Matrix& y() const noexcept { return *y_; }
  const ObservedMask* mask() const noexcept { return kind_ == ProblemKind::Complete ? mask_ : nullptr; }
  Index rows() const noexcept { return y_->rows(); }
  Index cols() const noexcept { return y_->cols(); }

  void check_factors(const FactorPair& fp) const {
    require(fp.rows() == rows() && fp.cols() == cols(), ErrorKind::InvalidInput,
            "factor dimensions do not match Y");
    if (kind_ == ProblemKind::Nmf)
      require((fp.u.array() >= 0.0).all() && (fp.v.array() >= 0.0).all(),
              ErrorKind::ConstraintViolation, "nonnegative factorization requires U, V >= 0");
  }

  /// ||P(Y - U V^T)||_F^2
  double residual_sq_norm(const FactorPair& fp, ResidualPath path = ResidualPath::Auto) const {
    if (mask()) return masked_residual_sq_norm(*y_, *mask_, fp, path);
    return (*y_ - fp.product()).squaredNorm();
  }

  /// P(U V^T - Y) V for side U, P(U V^T - Y)^T U for side V.
  Matrix residual_times_factor(Side side, const FactorPair& fp,
                               ResidualPath path = ResidualPath::Auto) const {
    if (mask()) return masked_residual_times_factor(side, *y_, *mask_, fp, path);
    if (fp.rank() == 0) return Matrix::Zero(side == Side::U ? rows() : cols(), 0);
    // (U V^T - Y) V = U (V^T V) - Y V, never forming the m x n product.
    if (side == Side::U) return fp.u * (fp.v.transpose() * fp.v) - *y_ * fp.v;
    return fp.v * (fp.u.transpose() * fp.u) - y_->transpose() * fp.u;
  }

 private:
  ProblemKind kind_;
  const Matrix* y_;
  const ObservedMask* mask_;
};

inline void check_lambda(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::InvalidParameter,
          "lambda must be positive");
}

/// 1/2 ||P(Y - U V^T)||_F^2 + lambda * h_eta(U, V).
inline double objective(const Problem& problem, const FactorPair& fp, double lambda, double eta,
                        ResidualPath path = ResidualPath::Auto) {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::InvalidParameter,
          "lambda must be nonnegative");
  problem.check_factors(fp);
  return 0.5 * problem.residual_sq_norm(fp, path) + lambda * smoothed_regularizer(fp, eta);
}

/**
 * Exact gradient of the eta-smoothed objective with respect to one factor:
 *   grad_U = P(U V^T - Y) V + lambda U D,  grad_V = P(U V^T - Y)^T U + lambda V D.
 */
inline Matrix gradient(const Problem& problem, Side side, const FactorPair& fp, double lambda,
                       double eta, ResidualPath path = ResidualPath::Auto) {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::InvalidParameter,
          "lambda must be nonnegative");
  problem.check_factors(fp);
  Matrix g = problem.residual_times_factor(side, fp, path);
  if (lambda > 0.0 && fp.rank() > 0) {
    const WeightDiag w = weight_diag(fp, eta);
    g.noalias() += lambda * (fp.factor(side) * w.as_diagonal());
  }
  return g;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// ||X0 - U V^T||_F / ||X0||_F
inline double nre(const Matrix& x0, const FactorPair& fp) {
  const double denom = x0.norm();
  require(denom > 0.0, ErrorKind::InvalidInput, "NRE undefined for a zero ground truth");
  require(fp.rows() == x0.rows() && fp.cols() == x0.cols(), ErrorKind::InvalidInput,
          "factor dimensions do not match X0");
  return (x0 - fp.product()).norm() / denom;
}

/// Mean absolute error on the observed set, scaled by the 1..5 rating range.
inline double nmae(const Matrix& y, const ObservedMask& mask, const FactorPair& fp) {
  require(mask.size() > 0, ErrorKind::InvalidInput, "NMAE requires a nonempty mask");
  require(mask.rows() == y.rows() && mask.cols() == y.cols() && fp.rows() == y.rows() &&
              fp.cols() == y.cols(),
          ErrorKind::InvalidInput, "dimension mismatch in NMAE");
  const Vector r = detail::observed_residuals(y, mask, fp);
  return r.cwiseAbs().sum() / (4.0 * static_cast<double>(mask.size()));
}

/// Degrees-of-freedom ratio r (2n - r) / card(Omega).
inline double freedom_ratio(Index rank, Index n, std::size_t card_omega) {
  require(card_omega > 0, ErrorKind::InvalidInput, "card(Omega) must be positive");
  require(rank > 0 && n > 0 && rank <= n, ErrorKind::InvalidInput, "need 0 < r <= n");
  return static_cast<double>(rank) * static_cast<double>(2 * n - rank) /
         static_cast<double>(card_omega);
}

}  // namespace airls

#endif  // AIRLS_CORE_HPP
