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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "airls/airls.hpp"

#include "support/reference.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace airls;

// Pinned tolerances and budgets.
constexpr double kDenoiseMedianNre = 0.05;
constexpr double kDenoiseRankFraction = 0.90;
constexpr double kDenoiseSeconds = 30.0;
constexpr double kCompletionMedianNre = 0.20;
constexpr double kCompletionRankFraction = 0.80;
constexpr double kCompletionSeconds = 60.0;
constexpr double kNmfMedianNre = 0.05;
constexpr Index kNmfRankLow = 5;
constexpr Index kNmfRankHigh = 8;
constexpr double kNmfSeconds = 120.0;
constexpr double kMonotoneTol = 1e-10;
constexpr double kPsdTol = -1e-8;
constexpr double kMajorizationTol = -1e-9;
constexpr double kProximityTol = -1e-9;
constexpr double kGradientRelTol = 1e-5;
constexpr double kHessianRelTol = 1e-4;
constexpr double kUpdateTol = 1e-8;
constexpr double kArmijoRelTol = 1e-12;
constexpr double kArmijoAbsTol = 1e-9;
constexpr double kFullMaskTol = 1e-10;

constexpr int kEvalSeeds = 20;
constexpr std::uint64_t kTuningSeed = 1000;
// Instance k uses seed kTuningSeed + 10 k; the solver, noise and mask draw
// from independent streams of that seed.
std::uint64_t eval_seed(int k) { return kTuningSeed + 10 * static_cast<std::uint64_t>(k + 1); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool all_pass = true;

void report(int id, bool pass, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  all_pass = all_pass && pass;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

struct Instance {
  ProblemKind kind;
  Matrix x0;
  Matrix y;
  std::optional<ObservedMask> mask;
};

Instance make_instance(ProblemKind kind, Index m, Index n, Index r, double snr, std::size_t card,
                       std::uint64_t seed) {
  Instance inst{kind, {}, {}, std::nullopt};
  const Distribution dist = kind == ProblemKind::Nmf ? Distribution::Uniform01 : Distribution::Gaussian;
  inst.x0 = gen_lowrank(m, n, r, dist, seed);
  inst.y = add_noise_snr(inst.x0, snr, seed + 1);
  if (kind == ProblemKind::Nmf) inst.y = inst.y.cwiseMax(0.0);
  if (kind == ProblemKind::Complete) {
    inst.mask = sample_mask(m, n, card, seed + 2);
    inst.y = apply_mask(inst.y, *inst.mask);
  }
  return inst;
}

// Objective by plain Eigen expressions, used to re-check line searches.
double plain_objective(const Matrix& y, const Matrix& u, const Matrix& v, double lambda,
                       double eta) {
  const double data = (y - u * v.transpose()).squaredNorm();
  const Vector s = (u.colwise().squaredNorm() + v.colwise().squaredNorm()).transpose();
  return 0.5 * data + lambda * (s.array() + eta * eta).sqrt().sum();
}

// ---------------------------------------------------------------------------
// Traced solves
// ---------------------------------------------------------------------------

struct RunStats {
  double max_increase = -std::numeric_limits<double>::infinity();  // unpruned f_{k+1} - f_k
  double max_trace_increase = -std::numeric_limits<double>::infinity();  // trace values
  double min_proximity_gap = std::numeric_limits<double>::infinity();  // (f_k - f_{k+1}) - delta_k
  double min_entry = std::numeric_limits<double>::infinity();
  int armijo_checked = 0;
  int armijo_violations = 0;
  double worst_armijo = std::numeric_limits<double>::infinity();
  double seconds = 0.0;
};

SolveResult traced_solve(const Instance& inst, const SolverConfig& cfg, RunStats& st,
                         bool check_armijo) {
  auto step = [&](const StepView& s) {
    st.max_increase = std::max(st.max_increase, s.objective_next - s.objective_prev);
    st.min_proximity_gap =
        std::min(st.min_proximity_gap, (s.objective_prev - s.objective_next) - s.delta);
    if (inst.kind == ProblemKind::Nmf && s.next.rank() > 0)
      st.min_entry = std::min({st.min_entry, s.next.u.minCoeff(), s.next.v.minCoeff()});
  };
  auto half = [&](int, const FactorPair& before, const NmfHalfStep& hs) {
    const ArmijoResult& a = hs.armijo;
    if (a.candidate.size() > 0) st.min_entry = std::min(st.min_entry, a.candidate.minCoeff());
    if (!check_armijo || !a.accepted) return;
    const Matrix& x = before.factor(hs.side);
    const auto flags = hs.active.flags(x.cols());
    double free_part = 0.0;
    double active_part = 0.0;
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j) {
        if (flags(i, j))
          active_part += hs.grad(i, j) * (x(i, j) - a.candidate(i, j));
        else
          free_part += hs.grad(i, j) * hs.direction(i, j);
      }
    const double rhs = cfg.nmf.sigma * (a.alpha * free_part + active_part);
    const Matrix& u_next = hs.side == Side::U ? a.candidate : before.u;
    const Matrix& v_next = hs.side == Side::V ? a.candidate : before.v;
    const double f0 = plain_objective(inst.y, before.u, before.v, cfg.lambda, cfg.eta);
    const double f1 = plain_objective(inst.y, u_next, v_next, cfg.lambda, cfg.eta);
    const double slack = (f0 - f1) - rhs;
    ++st.armijo_checked;
    st.worst_armijo = std::min(st.worst_armijo, slack);
    if (slack < -(kArmijoAbsTol + kArmijoRelTol * std::abs(f0))) ++st.armijo_violations;
  };
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  switch (inst.kind) {
    case ProblemKind::Denoise: res = solve_denoise(inst.y, cfg, step); break;
    case ProblemKind::Complete: res = solve_mc(inst.y, *inst.mask, cfg, step); break;
    case ProblemKind::Nmf: res = solve_nmf(inst.y, cfg, step, half); break;
  }
  st.seconds = seconds_since(t0);
  double prev = res.trace.initial_objective;
  for (const IterationRecord& it : res.trace.iterations) {
    st.max_trace_increase = std::max(st.max_trace_increase, it.objective - prev);
    prev = it.objective;
  }
  return res;
}

SolveResult plain_solve(const Instance& inst, const SolverConfig& cfg) {
  switch (inst.kind) {
    case ProblemKind::Denoise: return solve_denoise(inst.y, cfg);
    case ProblemKind::Complete: return solve_mc(inst.y, *inst.mask, cfg);
    case ProblemKind::Nmf: return solve_nmf(inst.y, cfg);
  }
  return {};
}

/// Lowest-NRE lambda on the tuning instance.
double bench_lambda(ProblemKind kind, const std::vector<double>& grid, const SolverConfig& base,
                    Index m, Index n, Index r, std::size_t card) {
  const Instance inst = make_instance(kind, m, n, r, 20.0, card, kTuningSeed);
  double best = grid.front();
  double best_nre = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    SolverConfig cfg = base;
    cfg.lambda = lambda;
    cfg.seed = kTuningSeed;
    const double e = nre(inst.x0, plain_solve(inst, cfg).factors);
    if (e < best_nre) {
      best_nre = e;
      best = lambda;
    }
  }
  std::printf("  bench %s: lambda=%g (tuning NRE %.4f)\n", to_string(kind), best, best_nre);
  return best;
}

// ---------------------------------------------------------------------------
// Criteria 1-3 and the trace checks of 7 and 10
// ---------------------------------------------------------------------------

struct SyntheticOutcome {
  std::vector<double> nre;
  std::vector<Index> rank;
  double seconds = 0.0;
  // Aggregates for the trace criteria.
  double worst_proximity = std::numeric_limits<double>::infinity();
  int sublinear_failures = 0;
  double worst_sublinear = std::numeric_limits<double>::infinity();
  int displacement_failures = 0;
  double worst_displacement = std::numeric_limits<double>::infinity();
  int precondition_failures = 0;
  double min_entry = std::numeric_limits<double>::infinity();
  int armijo_checked = 0;
  int armijo_violations = 0;
  double worst_armijo = std::numeric_limits<double>::infinity();
};

SyntheticOutcome run_synthetic(ProblemKind kind, const SolverConfig& cfg, Index m, Index n, Index r,
                               std::size_t card) {
  SyntheticOutcome out;
  for (int k = 0; k < kEvalSeeds; ++k) {
    const Instance inst = make_instance(kind, m, n, r, 20.0, card, eval_seed(k));
    SolverConfig c = cfg;
    c.seed = eval_seed(k);
    RunStats st;
    const SolveResult res = traced_solve(inst, c, st, kind == ProblemKind::Nmf);
    out.seconds += st.seconds;
    out.nre.push_back(nre(inst.x0, res.factors));
    out.rank.push_back(res.factors.rank());
    out.worst_proximity = std::min(out.worst_proximity, st.min_proximity_gap);
    const RateBoundReport rate = rate_bound_check(res.trace, c.lambda, c.eta);
    out.sublinear_failures += rate.sublinear_holds ? 0 : 1;
    out.worst_sublinear = std::min(out.worst_sublinear, rate.sublinear_slack);
    out.displacement_failures += rate.displacement_holds ? 0 : 1;
    out.worst_displacement = std::min(out.worst_displacement, rate.displacement_slack);
    out.precondition_failures += rate.precondition ? 0 : 1;
    out.min_entry = std::min(out.min_entry, st.min_entry);
    out.armijo_checked += st.armijo_checked;
    out.armijo_violations += st.armijo_violations;
    out.worst_armijo = std::min(out.worst_armijo, st.worst_armijo);
  }
  return out;
}

int count_rank(const std::vector<Index>& ranks, Index lo, Index hi) {
  return static_cast<int>(
      std::count_if(ranks.begin(), ranks.end(), [&](Index d) { return d >= lo && d <= hi; }));
}

// ---------------------------------------------------------------------------
// Criterion 4
// ---------------------------------------------------------------------------

struct MonotoneOutcome {
  double worst_step = -std::numeric_limits<double>::infinity();
  double worst_trace = -std::numeric_limits<double>::infinity();
  double min_entry = std::numeric_limits<double>::infinity();
  int armijo_checked = 0;
  int armijo_violations = 0;
  double worst_armijo = std::numeric_limits<double>::infinity();
};

MonotoneOutcome run_random_instances(ProblemKind kind, std::uint64_t seed) {
  MonotoneOutcome out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> dim(8, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Index m = dim(rng);
    const Index n = dim(rng);
    const Index r = 1 + static_cast<Index>(unit(rng) * 3.0);
    const double snr = 5.0 + 25.0 * unit(rng);
    const auto card = static_cast<std::size_t>(
        std::max<double>(1.0, std::round((0.3 + 0.6 * unit(rng)) * static_cast<double>(m * n))));
    const Instance inst = make_instance(kind, m, n, r, snr, card, seed * 1000 + 10 * t);
    SolverConfig cfg;
    cfg.d_init = r + 1 + static_cast<Index>(unit(rng) * 6.0);
    cfg.lambda = std::pow(10.0, -1.0 + 2.0 * unit(rng)) * inst.y.norm() / std::sqrt(m + n);
    cfg.max_iter = 200;
    cfg.seed = seed + t;
    RunStats st;
    traced_solve(inst, cfg, st, kind == ProblemKind::Nmf);
    out.worst_step = std::max(out.worst_step, st.max_increase);
    out.worst_trace = std::max(out.worst_trace, st.max_trace_increase);
    out.min_entry = std::min(out.min_entry, st.min_entry);
    out.armijo_checked += st.armijo_checked;
    out.armijo_violations += st.armijo_violations;
    out.worst_armijo = std::min(out.worst_armijo, st.worst_armijo);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria 5 and 6
// ---------------------------------------------------------------------------

struct GapOutcome {
  double worst_psd = std::numeric_limits<double>::infinity();
  double worst_sample = std::numeric_limits<double>::infinity();
};

GapOutcome majorization(ProblemKind kind) {
  GapOutcome out;
  std::mt19937_64 rng(static_cast<std::uint64_t>(kind) + 77);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (unsigned t = 0; t < 10; ++t) {
    const Index m = 6 + t % 3;
    const Index n = 5 + t % 4;
    const Instance inst = make_instance(kind, m, n, 2, 15.0, static_cast<std::size_t>(m * n / 2),
                                        500 + 10 * t);
    const bool nonneg = kind == ProblemKind::Nmf;
    Matrix u = ref::gaussian(m, 3, 600 + t);
    Matrix v = ref::gaussian(n, 3, 700 + t);
    if (nonneg) {
      u = u.cwiseAbs();
      v = v.cwiseAbs();
    }
    const FactorPair fp(u, v);
    const double lambda = 0.5 + t;
    const double eta = 1e-6;
    const Problem problem(kind, inst.y, inst.mask ? &*inst.mask : nullptr);
    for (Side side : {Side::U, Side::V}) {
      out.worst_psd = std::min(out.worst_psd, psd_gap(problem, side, fp, lambda, eta));
      const Matrix& x = fp.factor(side);
      for (int s = 0; s < 100; ++s) {
        Matrix pt = x;
        const double scale = std::pow(10.0, s % 5 - 3);
        for (Index i = 0; i < pt.size(); ++i) pt(i) += scale * normal(rng);
        if (nonneg) pt = pt.cwiseMax(0.0);
        out.worst_sample = std::min(out.worst_sample, surrogate_gap(problem, side, fp, lambda, eta, pt));
      }
    }
  }
  return out;
}

struct AlphaOutcome {
  double worst_arc = std::numeric_limits<double>::infinity();
  double worst_local = std::numeric_limits<double>::infinity();
  double min_alpha = std::numeric_limits<double>::infinity();
  std::size_t active = 0;
};

AlphaOutcome alpha_majorization() {
  AlphaOutcome out;
  std::mt19937_64 rng(91);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (unsigned t = 0; t < 10; ++t) {
    const Instance inst = make_instance(ProblemKind::Nmf, 7, 6, 2, 15.0, 0, 800 + 10 * t);
    Matrix u = ref::uniform(7, 3, 900 + t);
    Matrix v = ref::uniform(6, 3, 950 + t);
    for (Index i = 0; i < u.size(); i += 4) u(i) = 0.0;
    for (Index i = 1; i < v.size(); i += 5) v(i) = 0.0;
    const FactorPair fp(u, v);
    const double lambda = 0.3 + 0.2 * t;
    const double eta = 1e-6;
    const Problem problem(ProblemKind::Nmf, inst.y);
    for (Side side : {Side::U, Side::V}) {
      const Matrix& x = fp.factor(side);
      const Matrix g = gradient(problem, side, fp, lambda, eta);
      const ActiveSet act = active_set_rows(x, g, 1e-6);
      out.active += act.count();
      const Matrix& fixed = side == Side::U ? fp.v : fp.u;
      Matrix h = fixed.transpose() * fixed;
      h.diagonal() += lambda * weight_diag(fp, eta).entries;
      const double alpha = std::min(1.0, nmf_alpha_bound(problem, side, fp, lambda, eta, act));
      out.min_alpha = std::min(out.min_alpha, alpha);
      const Matrix dir = newton_directions(g, h, act);
      // Points on the projected arc inside the step cap.
      for (int j = 0; j < 20; ++j) {
        const double a = alpha * std::pow(0.7, j);
        const Matrix pt = (x - a * dir).cwiseMax(0.0);
        out.worst_arc = std::min(out.worst_arc,
                                 surrogate_gap(problem, side, fp, lambda, eta, pt, &act, alpha));
      }
      // Feasible points in a small neighbourhood.
      for (int s = 0; s < 80; ++s) {
        Matrix pt = x;
        const double scale = std::pow(10.0, -(2 + s % 4));
        for (Index i = 0; i < pt.size(); ++i) pt(i) += scale * normal(rng);
        pt = pt.cwiseMax(0.0);
        out.worst_local = std::min(out.worst_local,
                                   surrogate_gap(problem, side, fp, lambda, eta, pt, &act, alpha));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria 8, 9, 11
// ---------------------------------------------------------------------------

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

ObservedMask mask_from_indicator(const Matrix& w) {
  std::vector<Entry> e;
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j)
      if (w(i, j) != 0.0) e.push_back({i, j});
  return ObservedMask(w.rows(), w.cols(), std::move(e));
}

std::pair<double, double> derivative_checks() {
  double worst_grad = 0.0;
  for (ProblemKind kind : {ProblemKind::Denoise, ProblemKind::Complete, ProblemKind::Nmf}) {
    for (unsigned t = 0; t < 20; ++t) {
      const Matrix y = kind == ProblemKind::Nmf ? ref::uniform(7, 6, t) : ref::gaussian(7, 6, t);
      const Matrix w = kind == ProblemKind::Complete ? ref::bernoulli_mask(7, 6, 0.6, t + 50) : Matrix();
      const std::optional<ObservedMask> mask =
          w.size() ? std::optional<ObservedMask>(mask_from_indicator(w)) : std::nullopt;
      Matrix u = ref::gaussian(7, 3, t + 100);
      Matrix v = ref::gaussian(6, 3, t + 200);
      if (kind == ProblemKind::Nmf) {
        u = u.cwiseAbs();
        v = v.cwiseAbs();
      }
      const double lambda = 0.5 + 0.25 * t;
      const double eta = 1e-6;
      const Problem problem(kind, y, mask ? &*mask : nullptr);
      const FactorPair fp(u, v);
      const Matrix fd_u = ref::fd_gradient(
          [&](const Matrix& x) { return ref::objective(y, w, x, v, lambda, eta); }, u);
      const Matrix fd_v = ref::fd_gradient(
          [&](const Matrix& x) { return ref::objective(y, w, u, x, lambda, eta); }, v);
      worst_grad = std::max(worst_grad, rel(gradient(problem, Side::U, fp, lambda, eta), fd_u));
      worst_grad = std::max(worst_grad, rel(gradient(problem, Side::V, fp, lambda, eta), fd_v));
    }
  }
  double worst_hess = 0.0;
  for (ProblemKind kind : {ProblemKind::Denoise, ProblemKind::Complete}) {
    for (unsigned t = 0; t < 5; ++t) {
      const Matrix y = ref::gaussian(3, 4, 300 + t);
      const Matrix w = kind == ProblemKind::Complete ? ref::bernoulli_mask(3, 4, 0.6, 310 + t) : Matrix();
      const std::optional<ObservedMask> mask =
          w.size() ? std::optional<ObservedMask>(mask_from_indicator(w)) : std::nullopt;
      const FactorPair fp(ref::gaussian(3, 2, 320 + t), ref::gaussian(4, 2, 330 + t));
      const double lambda = 1.0 + t;
      const double eta = 1e-3;
      const Problem problem(kind, y, mask ? &*mask : nullptr);
      const Matrix yt = y.transpose();
      const Matrix wt = w.size() ? Matrix(w.transpose()) : Matrix();
      const Matrix fd_u = ref::fd_hessian(
          [&](const Matrix& x) { return ref::grad_u(y, w, x, fp.v, lambda, eta); }, fp.u);
      const Matrix fd_v = ref::fd_hessian(
          [&](const Matrix& x) { return ref::grad_u(yt, wt, x, fp.u, lambda, eta); }, fp.v);
      worst_hess = std::max(worst_hess, rel(exact_hessian(problem, Side::U, fp, lambda, eta).h, fd_u));
      worst_hess = std::max(worst_hess, rel(exact_hessian(problem, Side::V, fp, lambda, eta).h, fd_v));
    }
  }
  return {worst_grad, worst_hess};
}

double update_equivalence() {
  double worst = 0.0;
  for (unsigned t = 0; t < 10; ++t) {
    const Matrix y = ref::gaussian(6, 5, 400 + t);
    const Matrix w = ref::bernoulli_mask(6, 5, 0.6, 410 + t);
    const ObservedMask mask = mask_from_indicator(w);
    const Matrix u = ref::gaussian(6, 2, 420 + t);
    const Matrix v = ref::gaussian(5, 2, 430 + t);
    const double lambda = 0.5 + t;
    const double eta = 1e-6;
    const FactorPair fp(u, v);
    const WeightDiag wd = weight_diag(fp, eta);
    const ref::Vec pair = ref::pair_norms(u, v, eta);
    const Matrix want_dn = ref::dense_surrogate_argmin(
        u, ref::grad_u(y, Matrix(), u, v, lambda, eta), v, lambda, pair);
    const Matrix want_mc =
        ref::dense_surrogate_argmin(u, ref::grad_u(y, w, u, v, lambda, eta), v, lambda, pair);
    worst = std::max(worst,
                     (update_factor_denoise(Side::U, y, fp, wd, lambda) - want_dn).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (update_factor_mc(Side::U, y, mask, fp, wd, lambda) - want_mc).cwiseAbs().maxCoeff());
    const Matrix want_dn_v = ref::dense_surrogate_argmin(
        v, ref::grad_u(y.transpose(), Matrix(), v, u, lambda, eta), u, lambda, pair);
    const Matrix want_mc_v = ref::dense_surrogate_argmin(
        v, ref::grad_u(y.transpose(), w.transpose(), v, u, lambda, eta), u, lambda, pair);
    worst = std::max(worst, (update_factor_denoise(Side::V, y, fp, wd, lambda) - want_dn_v)
                                .cwiseAbs()
                                .maxCoeff());
    worst = std::max(worst, (update_factor_mc(Side::V, y, mask, fp, wd, lambda) - want_mc_v)
                                .cwiseAbs()
                                .maxCoeff());
  }
  return worst;
}

double full_mask_reduction() {
  double worst = 0.0;
  for (unsigned t = 0; t < 3; ++t) {
    const Matrix x0 = gen_lowrank(25, 20, 3, Distribution::Gaussian, 1100 + 10 * t);
    const Matrix y = add_noise_snr(x0, 15.0, 1101 + 10 * t);
    SolverConfig cfg;
    cfg.d_init = 6;
    cfg.lambda = 2.0 + t;
    cfg.max_iter = 20;
    cfg.tol = 1e-300;
    cfg.seed = 1102 + 10 * t;
    const FactorPair init = initial_factors(y, cfg.d_init, cfg.seed);
    std::vector<FactorPair> a_iter;
    std::vector<FactorPair> b_iter;
    solve_mc(y, ObservedMask::full(25, 20), cfg, [&](const StepView& s) { a_iter.push_back(s.next); },
             init);
    solve_denoise(y, cfg, [&](const StepView& s) { b_iter.push_back(s.next); }, init);
    if (a_iter.size() != b_iter.size() || a_iter.size() != 20) return std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a_iter.size(); ++k) {
      if (a_iter[k].rank() != b_iter[k].rank()) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, (a_iter[k].u - b_iter[k].u).cwiseAbs().maxCoeff());
      worst = std::max(worst, (a_iter[k].v - b_iter[k].v).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace

int main() {
  // 1: denoising.
  SolverConfig dn;
  dn.d_init = 40;
  dn.tol = 1e-6;
  dn.lambda = bench_lambda(ProblemKind::Denoise, {0.1, 1, 5, 10, 20, 50, 80, 100, 200}, dn, 200, 200,
                           5, 0);
  const SyntheticOutcome c1 = run_synthetic(ProblemKind::Denoise, dn, 200, 200, 5, 0);
  {
    const double med = median(c1.nre);
    const double frac = count_rank(c1.rank, 5, 5) / static_cast<double>(kEvalSeeds);
    report(1, med <= kDenoiseMedianNre && frac >= kDenoiseRankFraction && c1.seconds <= kDenoiseSeconds,
           fmt("denoise 200x200 r=5: median NRE %.4f (<= %.2f), d=5 in %.0f%% (>= %.0f%%), %.1f s (<= %.0f s)",
               med, kDenoiseMedianNre, 100 * frac, 100 * kDenoiseRankFraction, c1.seconds,
               kDenoiseSeconds));
  }

  // 2: completion.
  const std::size_t card = card_for_freedom_ratio(10, 300, 0.4);
  SolverConfig mc;
  mc.d_init = 50;
  mc.lambda = bench_lambda(ProblemKind::Complete, {5, 8, 10, 12, 15, 20, 25, 30, 40}, mc, 300, 300,
                           10, card);
  const SyntheticOutcome c2 = run_synthetic(ProblemKind::Complete, mc, 300, 300, 10, card);
  {
    const double med = median(c2.nre);
    const double frac = count_rank(c2.rank, 10, 10) / static_cast<double>(kEvalSeeds);
    report(2,
           med <= kCompletionMedianNre && frac >= kCompletionRankFraction &&
               c2.seconds <= kCompletionSeconds,
           fmt("completion 300x300 r=10 card=%zu: median NRE %.4f (<= %.2f), d=10 in %.0f%% (>= %.0f%%), "
               "%.1f s (<= %.0f s)",
               card, med, kCompletionMedianNre, 100 * frac, 100 * kCompletionRankFraction, c2.seconds,
               kCompletionSeconds));
  }

  // 3: NMF.
  SolverConfig nm;
  nm.d_init = 40;
  nm.lambda = bench_lambda(ProblemKind::Nmf, {1, 2, 3, 4, 5, 6, 8, 10, 15}, nm, 200, 200, 5, 0);
  const SyntheticOutcome c3 = run_synthetic(ProblemKind::Nmf, nm, 200, 200, 5, 0);
  {
    const double med = median(c3.nre);
    const int in_range = count_rank(c3.rank, kNmfRankLow, kNmfRankHigh);
    double mean_rank = 0.0;
    for (Index d : c3.rank) mean_rank += static_cast<double>(d) / kEvalSeeds;
    report(3, med <= kNmfMedianNre && in_range == kEvalSeeds && c3.seconds <= kNmfSeconds,
           fmt("nmf 200x200 r=5: median NRE %.4f (<= %.2f), rank in [%ld,%ld] for %d/%d (mean %.2f), "
               "%.1f s (<= %.0f s)",
               med, kNmfMedianNre, static_cast<long>(kNmfRankLow), static_cast<long>(kNmfRankHigh),
               in_range, kEvalSeeds, mean_rank, c3.seconds, kNmfSeconds));
  }

  // 4: monotonicity on random instances.
  const MonotoneOutcome m_dn = run_random_instances(ProblemKind::Denoise, 11);
  const MonotoneOutcome m_mc = run_random_instances(ProblemKind::Complete, 12);
  const MonotoneOutcome m_nm = run_random_instances(ProblemKind::Nmf, 13);
  {
    const double worst = std::max({m_dn.worst_step, m_dn.worst_trace, m_mc.worst_step,
                                   m_mc.worst_trace, m_nm.worst_step, m_nm.worst_trace});
    report(4, worst <= kMonotoneTol,
           fmt("50 instances per solver: max f_{k+1}-f_k denoise %.2e/%.2e, completion %.2e/%.2e, "
               "nmf %.2e/%.2e (step/trace, <= %.0e)",
               m_dn.worst_step, m_dn.worst_trace, m_mc.worst_step, m_mc.worst_trace, m_nm.worst_step,
               m_nm.worst_trace, kMonotoneTol));
  }

  // 5: global majorization.
  {
    const GapOutcome g_dn = majorization(ProblemKind::Denoise);
    const GapOutcome g_mc = majorization(ProblemKind::Complete);
    const GapOutcome g_nm = majorization(ProblemKind::Nmf);
    const double psd = std::min({g_dn.worst_psd, g_mc.worst_psd, g_nm.worst_psd});
    const double sample = std::min({g_dn.worst_sample, g_mc.worst_sample, g_nm.worst_sample});
    report(5, psd >= kPsdTol && sample >= kMajorizationTol,
           fmt("min psd_gap %.2e (>= %.0e), min sampled gap %.2e (>= %.0e) over 10 instances x 3 kinds",
               psd, kPsdTol, sample, kMajorizationTol));
  }

  // 6: capped-step majorization for NMF.
  {
    const AlphaOutcome a = alpha_majorization();
    report(6, a.worst_arc >= kMajorizationTol && a.worst_local >= kMajorizationTol,
           fmt("min gap on projected arc %.2e, near iterate %.2e (>= %.0e); min alpha %.3e, %zu active "
               "coordinates",
               a.worst_arc, a.worst_local, kMajorizationTol, a.min_alpha, a.active));
  }

  // 7: proximity, sublinear rate and displacement bound over the runs of 1-3.
  {
    const SyntheticOutcome* runs[] = {&c1, &c2, &c3};
    const char* names[] = {"denoise", "completion", "nmf"};
    bool pass = true;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
      const SyntheticOutcome& o = *runs[i];
      const bool ok = o.worst_proximity >= kProximityTol && o.sublinear_failures == 0 &&
                      o.displacement_failures == 0;
      pass = pass && ok;
      detail += fmt("%s%s: min (f_k-f_k+1)-delta %.2e, sublinear fails %d (slack %.2e), displacement "
                    "fails %d (slack %.2e), precondition fails %d",
                    i ? "; " : "", names[i], o.worst_proximity, o.sublinear_failures, o.worst_sublinear,
                    o.displacement_failures, o.worst_displacement, o.precondition_failures);
    }
    report(7, pass, detail);
  }

  // 8: derivatives.
  {
    const auto [g, h] = derivative_checks();
    report(8, g <= kGradientRelTol && h <= kHessianRelTol,
           fmt("gradient rel err %.2e (<= %.0e) at 20 points x 3 kinds x 2 sides; Hessian rel err %.2e "
               "(<= %.0e) on 3x4, d=2",
               g, kGradientRelTol, h, kHessianRelTol));
  }

  // 9: surrogate minimizers.
  {
    const double worst = update_equivalence();
    report(9, worst <= kUpdateTol,
           fmt("max |update - dense surrogate minimizer| %.2e (<= %.0e) on 10 instances 6x5, d=2",
               worst, kUpdateTol));
  }

  // 10: NMF feasibility and line-search re-check.
  {
    const double min_entry = std::min(c3.min_entry, m_nm.min_entry);
    const int checked = c3.armijo_checked + m_nm.armijo_checked;
    const int bad = c3.armijo_violations + m_nm.armijo_violations;
    const double worst = std::min(c3.worst_armijo, m_nm.worst_armijo);
    report(10, min_entry >= 0.0 && bad == 0 && checked > 0,
           fmt("min iterate entry %.2e (>= 0); %d accepted steps re-checked, %d violations, worst "
               "slack %.2e",
               min_entry, checked, bad, worst));
  }

  // 11: full mask reduces to denoising.
  {
    const double worst = full_mask_reduction();
    report(11, worst <= kFullMaskTol,
           fmt("max iterate difference %.2e (<= %.0e) over 20 iterations on 3 instances", worst,
               kFullMaskTol));
  }

  std::printf("acceptance: %s\n", all_pass ? "all criteria pass" : "some criteria fail");
  return all_pass ? 0 : 1;
}
