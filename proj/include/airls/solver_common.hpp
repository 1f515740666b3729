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

#ifndef AIRLS_SOLVER_COMMON_HPP
#define AIRLS_SOLVER_COMMON_HPP

/**
 * @file solver_common.hpp
 * @brief Configuration, column pruning, the stopping rule, iteration traces
 *        and the alternating driver shared by the three solvers.
 */

#include "airls/core.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <random>

namespace airls {

struct NmfParams {
  double beta_u = 0.1;
  double beta_v = 0.1;
  double sigma = 1e-2;
  double eps_active = 1e-6;
  int max_backtracks = 40;
};

struct SolverConfig {
  double lambda = 1.0;
  double eta = 1e-6;
  Index d_init = 10;
  double tol = 1e-4;
  int max_iter = 500;
  double prune_tol = 1e-6;  // relative to the largest pair norm
  std::uint64_t seed = 0;
  NmfParams nmf;

  void validate() const {
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    require(positive(lambda), ErrorKind::InvalidParameter, "lambda must be positive");
    require(positive(eta), ErrorKind::InvalidParameter, "eta must be positive");
    require(d_init >= 1, ErrorKind::InvalidParameter, "d_init must be at least 1");
    require(positive(tol), ErrorKind::InvalidParameter, "tol must be positive");
    require(max_iter >= 1, ErrorKind::InvalidParameter, "max_iter must be at least 1");
    require(positive(prune_tol), ErrorKind::InvalidParameter, "prune_tol must be positive");
    require(nmf.beta_u > 0.0 && nmf.beta_u < 1.0, ErrorKind::InvalidParameter,
            "beta_u must lie in (0,1)");
    require(nmf.beta_v > 0.0 && nmf.beta_v < 1.0, ErrorKind::InvalidParameter,
            "beta_v must lie in (0,1)");
    require(positive(nmf.sigma), ErrorKind::InvalidParameter, "sigma must be positive");
    require(positive(nmf.eps_active), ErrorKind::InvalidParameter, "eps_active must be positive");
    require(nmf.max_backtracks >= 0, ErrorKind::InvalidParameter,
            "max_backtracks must be nonnegative");
  }
};

struct PruneEvent {
  int iteration = 0;
  std::vector<Index> removed;  // indices into the pre-prune factor
  std::vector<double> norms;   // pair norms at removal
};

struct IterationRecord {
  int k = 0;
  double objective = 0.0;
  Index d = 0;
  double rel_change = 0.0;
  double delta = 0.0;  // proximity measure of the step (k-1 -> k)
  double ms = 0.0;
  // Diagnostics of the step, taken before pruning.
  double step_sq = 0.0;        // ||U_k - U_{k-1}||^2 + ||V_k - V_{k-1}||^2
  double gram_min_eig = 0.0;   // min eigenvalue of the Gram matrices used by the step
  double tau = 0.0;            // max_i max(||u_i||^2, ||v_i||^2) over the step
};

enum class Status { Running, Converged, MaxIter, Degenerate };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::Converged: return "converged";
    case Status::MaxIter: return "max_iter";
    case Status::Degenerate: return "degenerate";
  }
  return "unknown";
}

struct IterationTrace {
  double initial_objective = 0.0;
  Index initial_d = 0;
  std::vector<IterationRecord> iterations;
  std::vector<PruneEvent> prunes;
  Status status = Status::Running;

  int num_iterations() const noexcept { return static_cast<int>(iterations.size()); }
  double final_objective() const {
    return iterations.empty() ? initial_objective : iterations.back().objective;
  }
};

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

struct PruneResult {
  FactorPair factors;
  WeightDiag weights;
  std::vector<Index> kept;
  std::vector<Index> removed;
  std::vector<double> removed_norms;
  bool degenerate = false;
};

/**
 * Drops every column pair whose norm is below threshold * (largest pair norm).
 * If the largest pair norm is zero every column goes. Survivors keep their
 * order and values.
 */
inline PruneResult prune_columns(const FactorPair& fp, const WeightDiag& w, double threshold) {
  require(threshold > 0.0, ErrorKind::InvalidParameter, "prune threshold must be positive");
  require(w.size() == fp.rank(), ErrorKind::InvalidInput, "weight size differs from factor rank");
  const Vector norms = column_pair_norms(fp);
  const double cutoff = norms.size() > 0 ? threshold * norms.maxCoeff() : 0.0;

  PruneResult out;
  for (Index i = 0; i < norms.size(); ++i) {
    if (norms[i] < cutoff || cutoff == 0.0) {
      out.removed.push_back(i);
      out.removed_norms.push_back(norms[i]);
    } else {
      out.kept.push_back(i);
    }
  }
  const auto kept = static_cast<Index>(out.kept.size());
  Matrix u(fp.rows(), kept);
  Matrix v(fp.cols(), kept);
  Vector wk(kept);
  for (Index c = 0; c < kept; ++c) {
    u.col(c) = fp.u.col(out.kept[static_cast<std::size_t>(c)]);
    v.col(c) = fp.v.col(out.kept[static_cast<std::size_t>(c)]);
    wk[c] = w.entries[out.kept[static_cast<std::size_t>(c)]];
  }
  out.factors = FactorPair(std::move(u), std::move(v));
  out.weights.entries = std::move(wk);
  out.degenerate = kept == 0;
  return out;
}

// ---------------------------------------------------------------------------
// Relative change of the reconstruction
// ---------------------------------------------------------------------------

enum class ProductPath { Auto, Gram, Dense };

/**
 * ||U_k V_k^T - U_{k+1} V_{k+1}^T||_F / ||U_k V_k^T||_F.
 *
 * The Gram path uses ||A B^T||^2 = tr((A^T A)(B^T B)) and never forms an
 * m x n product; Auto picks it when min(m, n) > 4 d.
 */
inline double relative_change(const FactorPair& prev, const FactorPair& next,
                              ProductPath path = ProductPath::Auto) {
  require(prev.rows() == next.rows() && prev.cols() == next.cols(), ErrorKind::InvalidInput,
          "factor pairs have different outer dimensions");
  const Index d = std::max(prev.rank(), next.rank());
  const bool gram =
      path == ProductPath::Gram ||
      (path == ProductPath::Auto && std::min(prev.rows(), prev.cols()) > 4 * d);
  if (!gram) {
    const Matrix x0 = prev.product();
    const double denom = x0.norm();
    require(denom > 0.0, ErrorKind::InvalidInput, "previous reconstruction is zero");
    return (x0 - next.product()).norm() / denom;
  }
  const Matrix uu = prev.u.transpose() * prev.u;
  const Matrix vv = prev.v.transpose() * prev.v;
  const double prev_sq = uu.cwiseProduct(vv).sum();
  require(prev_sq > 0.0, ErrorKind::InvalidInput, "previous reconstruction is zero");
  const Matrix uu1 = next.u.transpose() * next.u;
  const Matrix vv1 = next.v.transpose() * next.v;
  const Matrix cross_u = prev.u.transpose() * next.u;
  const Matrix cross_v = prev.v.transpose() * next.v;
  const double next_sq = uu1.cwiseProduct(vv1).sum();
  const double cross = cross_u.cwiseProduct(cross_v).sum();
  const double diff_sq = std::max(0.0, prev_sq - 2.0 * cross + next_sq);
  return std::sqrt(diff_sq / prev_sq);
}

// ---------------------------------------------------------------------------
// Stopping rule
// ---------------------------------------------------------------------------

struct StopDecision {
  bool stop = false;
  Status status = Status::Running;
};

inline StopDecision should_stop(const IterationTrace& trace, const SolverConfig& cfg) {
  require(!trace.iterations.empty(), ErrorKind::InvalidInput,
          "stopping rule needs at least one completed iteration");
  const IterationRecord& last = trace.iterations.back();
  if (last.d == 0) return {true, Status::Degenerate};
  if (last.rel_change < cfg.tol) return {true, Status::Converged};
  if (last.k >= cfg.max_iter) return {true, Status::MaxIter};
  return {false, Status::Running};
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

/**
 * Seeded Gaussian factors scaled by (||Y||_F / sqrt(m n d))^(1/2), so that
 * U V^T starts at the magnitude of Y. With nonnegative = true the absolute
 * values are taken.
 */
inline FactorPair initial_factors(const Matrix& y, Index d, std::uint64_t seed,
                                  bool nonnegative = false) {
  require(d >= 1, ErrorKind::InvalidParameter, "d must be at least 1");
  const double m = static_cast<double>(y.rows());
  const double n = static_cast<double>(y.cols());
  const double scale = std::sqrt(y.norm() / std::sqrt(m * n * static_cast<double>(d)));
  std::mt19937_64 rng = make_rng(seed, RngStream::Init);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Index rows) {
    Matrix f(rows, d);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < rows; ++i) {
        const double z = normal(rng);
        f(i, j) = scale * (nonnegative ? std::abs(z) : z);
      }
    return f;
  };
  Matrix u = draw(y.rows());
  Matrix v = draw(y.cols());
  return FactorPair(std::move(u), std::move(v));
}

// ---------------------------------------------------------------------------
// Alternating driver
// ---------------------------------------------------------------------------

/// What a solver step produced, before pruning.
struct StepResult {
  FactorPair next;
  double delta = 0.0;
  bool stalled = false;  // no factor could be moved this iteration
};

/// Read-only view handed to observers after every step.
struct StepView {
  int k = 0;
  const FactorPair& prev;
  const FactorPair& next;  // before pruning
  double objective_prev = 0.0;
  double objective_next = 0.0;  // of the unpruned pair
  double delta = 0.0;
};

using StepObserver = std::function<void(const StepView&)>;

struct SolveResult {
  FactorPair factors;
  IterationTrace trace;
};

namespace detail {

inline double min_gram_eig(const Matrix& f) {
  if (f.cols() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(f.transpose() * f, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_col_sq(const Matrix& f) {
  if (f.cols() == 0) return 0.0;
  return f.colwise().squaredNorm().maxCoeff();
}

/**
 * Runs `step(fp, k)` until the stopping rule fires. Records objective, d,
 * relative change and proximity per iteration; prunes after each step.
 */
template <class Step>
SolveResult run_alternating(const Problem& problem, const SolverConfig& cfg, FactorPair fp,
                            Step&& step, const StepObserver& observer,
                            int max_stalls = std::numeric_limits<int>::max()) {
  using clock = std::chrono::steady_clock;
  SolveResult result;
  IterationTrace& trace = result.trace;
  trace.initial_d = fp.rank();
  double f_prev = objective(problem, fp, cfg.lambda, cfg.eta);
  trace.initial_objective = f_prev;
  int stalls = 0;

  for (int k = 1;; ++k) {
    const auto t0 = clock::now();
    StepResult out = step(fp, k);
    const double f_step = objective(problem, out.next, cfg.lambda, cfg.eta);

    IterationRecord rec;
    rec.k = k;
    rec.delta = out.delta;
    rec.step_sq = (out.next.u - fp.u).squaredNorm() + (out.next.v - fp.v).squaredNorm();
    // Gram matrices entering the step: V_k (for U) and U_{k+1} (for V).
    rec.gram_min_eig = std::min(min_gram_eig(fp.v), min_gram_eig(out.next.u));
    rec.tau = std::max({max_col_sq(fp.u), max_col_sq(fp.v), max_col_sq(out.next.u),
                        max_col_sq(out.next.v)});
    if (observer) observer(StepView{k, fp, out.next, f_prev, f_step, out.delta});

    PruneResult pruned =
        prune_columns(out.next, weight_diag(out.next, cfg.eta), cfg.prune_tol);
    if (!pruned.removed.empty())
      trace.prunes.push_back({k, pruned.removed, pruned.removed_norms});

    const double prev_norm_sq = fp.rank() == 0 ? 0.0 : (fp.u.transpose() * fp.u).cwiseProduct(fp.v.transpose() * fp.v).sum();
    if (prev_norm_sq > 0.0)
      rec.rel_change = relative_change(fp, pruned.factors);
    else
      rec.rel_change = pruned.factors.rank() == 0 ? 0.0 : 1.0;

    fp = std::move(pruned.factors);
    rec.d = fp.rank();
    rec.objective = pruned.removed.empty() ? f_step : objective(problem, fp, cfg.lambda, cfg.eta);
    rec.ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    trace.iterations.push_back(rec);
    f_prev = rec.objective;

    stalls = out.stalled ? stalls + 1 : 0;
    StopDecision decision = should_stop(trace, cfg);
    if (!decision.stop && stalls >= max_stalls) decision = {true, Status::Converged};
    if (decision.stop) {
      trace.status = decision.status;
      break;
    }
  }
  result.factors = std::move(fp);
  return result;
}

}  // namespace detail

}  // namespace airls

#endif  // AIRLS_SOLVER_COMMON_HPP
