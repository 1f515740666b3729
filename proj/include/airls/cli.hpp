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

#ifndef AIRLS_CLI_HPP
#define AIRLS_CLI_HPP

// Command-line front end. Subcommands: denoise, complete, nmf, synth, verify,
// bench. Exit codes: 0 converged or max_iter, 1 runtime error, 2 usage error,
// 3 every column pruned.

#include "airls/completion.hpp"
#include "airls/core.hpp"
#include "airls/data_io.hpp"
#include "airls/denoise.hpp"
#include "airls/nmf.hpp"
#include "airls/oracles.hpp"
#include "airls/solver_common.hpp"
#include "airls/trace_json.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace airls::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDegenerate = 3;

struct Options {
  std::string command;
  std::string input;
  std::string format = "mm";
  std::string output;
  std::string trace;
  std::string truth;
  std::string test;
  bool trace_timing = false;
  SolverConfig cfg;

  // Synthetic instance.
  std::optional<Index> rows;
  std::optional<Index> cols;
  std::optional<Index> rank;
  double snr_db = std::numeric_limits<double>::infinity();
  std::string dist = "gaussian";
  std::optional<std::size_t> mask_card;

  // bench / verify
  std::string lambda_grid;
  std::string kind;

  bool has_synth() const { return rows.has_value() || cols.has_value() || rank.has_value(); }
};

/// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw UsageError("--lambda-grid: cannot parse '" + tok + "'");
    }
    if (used != tok.size() || !(v > 0.0) || !std::isfinite(v))
      throw UsageError("--lambda-grid: '" + tok + "' is not a positive number");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--lambda-grid is empty");
  return out;
}

namespace detail {

inline void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.input, "input matrix file");
  sub->add_option("--format", o.format, "input format")
      ->check(CLI::IsMember({"mm", "csv", "movielens"}));
  sub->add_option("--lambda", o.cfg.lambda, "regularization weight (> 0)");
  sub->add_option("--eta", o.cfg.eta, "smoothing constant (> 0)");
  sub->add_option("--rank-init", o.cfg.d_init, "initial number of columns");
  sub->add_option("--tol", o.cfg.tol, "relative-change tolerance");
  sub->add_option("--max-iter", o.cfg.max_iter, "iteration cap");
  sub->add_option("--prune-tol", o.cfg.prune_tol, "relative column pruning threshold");
  sub->add_option("--seed", o.cfg.seed, "random seed");
  sub->add_option("--output", o.output, "output prefix: writes PREFIX_U.mtx and PREFIX_V.mtx");
  sub->add_option("--trace", o.trace, "trace JSON path");
  sub->add_flag("--trace-timing", o.trace_timing, "record wall time per iteration in the trace");
  sub->add_option("--truth", o.truth, "ground-truth matrix for NRE");
  sub->add_option("--test", o.test, "held-out entries for NMAE (same format as --input)");
}

inline void add_synth(CLI::App* sub, Options& o) {
  sub->add_option("--rows", o.rows, "rows of the synthetic instance");
  sub->add_option("--cols", o.cols, "columns of the synthetic instance");
  sub->add_option("--rank", o.rank, "true rank of the synthetic instance");
  sub->add_option("--snr-db", o.snr_db, "signal-to-noise ratio in dB (default: no noise)");
  sub->add_option("--dist", o.dist, "factor distribution")
      ->check(CLI::IsMember({"gaussian", "uniform01"}));
  sub->add_option("--mask-card", o.mask_card, "number of observed entries");
}

inline void add_nmf(CLI::App* sub, Options& o) {
  sub->add_option("--beta-u", o.cfg.nmf.beta_u, "Armijo reduction factor for U");
  sub->add_option("--beta-v", o.cfg.nmf.beta_v, "Armijo reduction factor for V");
  sub->add_option("--sigma-armijo", o.cfg.nmf.sigma, "Armijo sufficient-decrease constant");
  sub->add_option("--eps-active", o.cfg.nmf.eps_active, "active-set threshold");
}

}  // namespace detail

/**
 * Parses argv into Options. Returns nullopt after printing help; throws
 * CLI::ParseError or UsageError on bad input.
 */
inline std::optional<Options> parse_args(int argc, const char* const* argv, std::ostream& out) {
  Options o;
  CLI::App app{"Low-rank matrix factorization by alternating reweighted least squares"};
  app.require_subcommand(1, 1);
  auto* denoise = app.add_subcommand("denoise", "low-rank denoising");
  auto* complete = app.add_subcommand("complete", "matrix completion");
  auto* nmf = app.add_subcommand("nmf", "nonnegative matrix factorization");
  auto* synth = app.add_subcommand("synth", "write a synthetic instance");
  auto* verify = app.add_subcommand("verify", "check solver invariants on a small instance");
  auto* bench = app.add_subcommand("bench", "select lambda on a grid by lowest NRE");
  for (auto* sub : {denoise, complete, nmf, verify, bench}) detail::add_common(sub, o);
  for (auto* sub : {denoise, complete, nmf, synth, verify, bench}) detail::add_synth(sub, o);
  for (auto* sub : {nmf, verify, bench}) detail::add_nmf(sub, o);
  synth->add_option("--seed", o.cfg.seed, "random seed");
  synth->add_option("--output", o.output, "output prefix")->required();
  bench->add_option("--lambda-grid", o.lambda_grid, "comma-separated lambda values")->required();
  for (auto* sub : {verify, bench})
    sub->add_option("--kind", o.kind, "problem kind")
        ->check(CLI::IsMember({"denoise", "complete", "nmf"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    o.cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (o.has_synth() && !(o.rows && o.cols && o.rank))
    throw UsageError("synthetic instances need --rows, --cols and --rank together");
  if (o.command == "synth" && !o.has_synth())
    throw UsageError("synth needs --rows, --cols and --rank");
  const bool solver = o.command == "denoise" || o.command == "complete" || o.command == "nmf";
  if (solver && o.input.empty() && !o.has_synth())
    throw UsageError("need --input or a synthetic instance (--rows, --cols, --rank)");
  if (solver && !o.input.empty() && o.has_synth())
    throw UsageError("--input and synthetic flags are mutually exclusive");
  if (o.command == "bench") {
    if (!o.has_synth() && (o.input.empty() || o.truth.empty()))
      throw UsageError("bench needs a synthetic instance or --input with --truth");
    (void)parse_grid(o.lambda_grid);
  }
  if (o.command == "bench" || o.command == "verify")
    if (o.kind.empty()) o.kind = "denoise";
  if (o.mask_card && *o.mask_card == 0)
    throw UsageError("--mask-card must be positive");
  return o;
}

// ---------------------------------------------------------------------------
// Instance assembly
// ---------------------------------------------------------------------------

struct Instance {
  ProblemKind kind = ProblemKind::Denoise;
  Matrix y;
  std::optional<ObservedMask> mask;
  std::optional<Matrix> truth;
  std::optional<Matrix> test_values;
  std::optional<ObservedMask> test_mask;
};

inline ProblemKind kind_from_name(const std::string& name) {
  if (name == "denoise") return ProblemKind::Denoise;
  if (name == "complete") return ProblemKind::Complete;
  return ProblemKind::Nmf;
}

/// Synthetic Y (and mask) for `kind`; NMF data are clipped at zero after noise.
inline Instance synthetic_instance(ProblemKind kind, const Options& o) {
  Instance inst;
  inst.kind = kind;
  const Distribution dist = parse_distribution(o.dist);
  Matrix x0 = gen_lowrank(*o.rows, *o.cols, *o.rank, dist, o.cfg.seed);
  inst.y = add_noise_snr(x0, o.snr_db, o.cfg.seed + 1);
  if (kind == ProblemKind::Nmf) {
    require((x0.array() >= 0.0).all(), ErrorKind::ConstraintViolation,
            "nmf needs nonnegative factors (use --dist uniform01)");
    inst.y = inst.y.cwiseMax(0.0);
  }
  if (kind == ProblemKind::Complete) {
    const auto total = static_cast<std::size_t>(*o.rows * *o.cols);
    inst.mask = sample_mask(*o.rows, *o.cols, o.mask_card.value_or(total), o.cfg.seed + 2);
    inst.y = apply_mask(inst.y, *inst.mask);
  }
  inst.truth = std::move(x0);
  return inst;
}

struct LoadedMatrix {
  Matrix dense;
  std::optional<SparseData> sparse;
};

inline LoadedMatrix load_matrix(const std::string& path, const std::string& format,
                                Index min_rows = 0, Index min_cols = 0) {
  LoadedMatrix out;
  if (format == "csv") {
    out.dense = read_csv(path);
  } else if (format == "movielens") {
    SparseData s = read_movielens(path, min_rows, min_cols);
    out.dense = s.dense();
    out.sparse = std::move(s);
  } else {
    MatrixMarketData mm = read_matrix_market(path);
    if (mm.format == MatrixMarketFormat::Coordinate) {
      SparseData s;
      s.rows = std::max(mm.rows, min_rows);
      s.cols = std::max(mm.cols, min_cols);
      s.triples = std::move(mm.triples);
      out.dense = s.dense();
      out.sparse = std::move(s);
    } else {
      out.dense = std::move(mm.dense);
    }
  }
  return out;
}

/**
 * File-backed instance. For completion the observed set is the list of stored
 * entries of a sparse input, or every entry of a dense one.
 */
inline Instance file_instance(ProblemKind kind, const Options& o) {
  Instance inst;
  inst.kind = kind;
  LoadedMatrix in = load_matrix(o.input, o.format);
  if (kind == ProblemKind::Complete && in.sparse) {
    inst.mask = in.sparse->mask();
  } else if (kind == ProblemKind::Complete) {
    inst.mask = ObservedMask::full(in.dense.rows(), in.dense.cols());
  }
  inst.y = std::move(in.dense);
  if (!o.truth.empty()) {
    Matrix t = load_matrix(o.truth, o.format == "movielens" ? "mm" : o.format).dense;
    require(t.rows() == inst.y.rows() && t.cols() == inst.y.cols(), ErrorKind::InvalidInput,
            "--truth dimensions differ from --input");
    inst.truth = std::move(t);
  }
  if (!o.test.empty()) {
    LoadedMatrix t = load_matrix(o.test, o.format, inst.y.rows(), inst.y.cols());
    require(t.sparse.has_value(), ErrorKind::InvalidInput, "--test must hold sparse entries");
    require(t.dense.rows() == inst.y.rows() && t.dense.cols() == inst.y.cols(),
            ErrorKind::InvalidInput, "--test has ids outside the training dimensions");
    inst.test_mask = t.sparse->mask();
    inst.test_values = std::move(t.dense);
  }
  return inst;
}

inline SolveResult solve_instance(const Instance& inst, const SolverConfig& cfg) {
  switch (inst.kind) {
    case ProblemKind::Denoise: return solve_denoise(inst.y, cfg);
    case ProblemKind::Complete: return solve_mc(inst.y, *inst.mask, cfg);
    case ProblemKind::Nmf: return solve_nmf(inst.y, cfg);
  }
  throw Error(ErrorKind::InvalidParameter, "unknown problem kind");
}

inline RunMetrics metrics_for(const Instance& inst, const FactorPair& fp) {
  RunMetrics m;
  if (inst.truth) m.nre = nre(*inst.truth, fp);
  if (inst.test_mask) {
    m.nmae = nmae(*inst.test_values, *inst.test_mask, fp);
  } else if (inst.kind == ProblemKind::Complete) {
    // With ground truth, score the unobserved entries; otherwise the observed ones.
    const ObservedMask& seen = *inst.mask;
    if (inst.truth && !seen.is_full()) {
      std::vector<Entry> held_out;
      for (Index i = 0; i < seen.rows(); ++i)
        for (Index j = 0; j < seen.cols(); ++j)
          if (!seen.contains(i, j)) held_out.push_back({i, j});
      m.nmae = nmae(*inst.truth, ObservedMask(seen.rows(), seen.cols(), std::move(held_out)), fp);
    } else {
      m.nmae = nmae(inst.y, seen, fp);
    }
  }
  return m;
}

inline std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

inline int exit_code_for(Status s) { return s == Status::Degenerate ? kExitDegenerate : kExitOk; }

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int run_solver(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemKind kind = kind_from_name(o.command);
  const Instance inst = o.has_synth() ? synthetic_instance(kind, o) : file_instance(kind, o);
  SolveResult res = solve_instance(inst, o.cfg);
  const RunMetrics metrics = metrics_for(inst, res.factors);
  if (!o.trace.empty()) write_trace(o.trace, o.cfg, res.trace, metrics, o.trace_timing);
  if (!o.output.empty()) {
    write_matrix_market_array(o.output + "_U.mtx", res.factors.u);
    write_matrix_market_array(o.output + "_V.mtx", res.factors.v);
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out << "status=" << to_string(res.trace.status)
      << " iterations=" << res.trace.num_iterations() << " d=" << res.factors.rank()
      << " objective=" << fmt(res.trace.final_objective())
      << " nre=" << (metrics.nre ? fmt(*metrics.nre) : "na")
      << " nmae=" << (metrics.nmae ? fmt(*metrics.nmae) : "na") << " time_ms=" << fmt(ms)
      << '\n';
  return exit_code_for(res.trace.status);
}

inline int run_synth(const Options& o, std::ostream& out) {
  const ProblemKind kind = o.mask_card ? ProblemKind::Complete : ProblemKind::Denoise;
  const Distribution dist = parse_distribution(o.dist);
  const Matrix x0 = gen_lowrank(*o.rows, *o.cols, *o.rank, dist, o.cfg.seed);
  Matrix y = add_noise_snr(x0, o.snr_db, o.cfg.seed + 1);
  if (dist == Distribution::Uniform01) y = y.cwiseMax(0.0);
  write_matrix_market_array(o.output + "_X0.mtx", x0);
  write_matrix_market_array(o.output + "_Y.mtx", y);
  if (kind == ProblemKind::Complete) {
    const ObservedMask mask = sample_mask(*o.rows, *o.cols, *o.mask_card, o.cfg.seed + 2);
    std::vector<Triple> t;
    t.reserve(mask.size());
    for (const Entry& e : mask.entries()) t.push_back({e.row, e.col, y(e.row, e.col)});
    write_matrix_market_coordinate(o.output + "_obs.mtx", *o.rows, *o.cols, t);
  }
  out << "wrote " << o.output << "_X0.mtx " << o.output << "_Y.mtx"
      << (kind == ProblemKind::Complete ? " " + o.output + "_obs.mtx" : std::string()) << '\n';
  return kExitOk;
}

inline int run_bench(const Options& o, std::ostream& out) {
  const ProblemKind kind = kind_from_name(o.kind);
  const Instance inst = o.has_synth() ? synthetic_instance(kind, o) : file_instance(kind, o);
  require(inst.truth.has_value(), ErrorKind::InvalidInput, "bench needs ground truth");
  double best_lambda = 0.0;
  double best_nre = std::numeric_limits<double>::infinity();
  std::optional<SolveResult> best;
  for (double lambda : parse_grid(o.lambda_grid)) {
    SolverConfig cfg = o.cfg;
    cfg.lambda = lambda;
    SolveResult res = solve_instance(inst, cfg);
    const double e = nre(*inst.truth, res.factors);
    out << "lambda=" << fmt(lambda) << " nre=" << fmt(e) << " d=" << res.factors.rank()
        << " iterations=" << res.trace.num_iterations()
        << " status=" << to_string(res.trace.status) << '\n';
    if (e < best_nre) {
      best_nre = e;
      best_lambda = lambda;
      best = std::move(res);
    }
  }
  out << "best_lambda=" << fmt(best_lambda) << " nre=" << fmt(best_nre) << '\n';
  if (!o.trace.empty()) {
    SolverConfig cfg = o.cfg;
    cfg.lambda = best_lambda;
    write_trace(o.trace, cfg, best->trace, metrics_for(inst, best->factors), o.trace_timing);
  }
  return kExitOk;
}

/// Small-instance invariant checks; exit 0 when all pass, 1 otherwise.
inline int run_verify(const Options& o, std::ostream& out) {
  const ProblemKind kind = kind_from_name(o.kind);
  Options small = o;
  if (!small.has_synth()) {
    small.rows = 12;
    small.cols = 10;
    small.rank = 2;
    small.snr_db = 20.0;
    if (kind == ProblemKind::Nmf) small.dist = "uniform01";
    if (kind == ProblemKind::Complete && !small.mask_card) small.mask_card = 80;
  }
  SolverConfig cfg = small.cfg;
  cfg.d_init = std::min<Index>(cfg.d_init, 4);
  cfg.max_iter = std::min(cfg.max_iter, 50);
  const Instance inst = synthetic_instance(kind, small);
  const Problem problem(kind, inst.y, inst.mask ? &*inst.mask : nullptr);

  bool ok = true;
  auto report = [&](const std::string& name, double value, bool pass) {
    out << name << ' ' << fmt(value) << ' ' << (pass ? "PASS" : "FAIL") << '\n';
    ok = ok && pass;
  };

  double worst_increase = -std::numeric_limits<double>::infinity();
  double worst_gap = std::numeric_limits<double>::infinity();
  double worst_psd = std::numeric_limits<double>::infinity();
  auto observer = [&](const StepView& s) {
    worst_increase = std::max(worst_increase, s.objective_next - s.objective_prev);
    worst_gap = std::min(worst_gap, (s.objective_prev - s.objective_next) - s.delta);
    if (kind != ProblemKind::Nmf && s.prev.rank() >= 1)
      for (Side side : {Side::U, Side::V})
        worst_psd = std::min(worst_psd, psd_gap(problem, side, s.prev, cfg.lambda, cfg.eta));
  };
  SolveResult res;
  switch (kind) {
    case ProblemKind::Denoise: res = solve_denoise(inst.y, cfg, observer); break;
    case ProblemKind::Complete: res = solve_mc(inst.y, *inst.mask, cfg, observer); break;
    case ProblemKind::Nmf: res = solve_nmf(inst.y, cfg, observer); break;
  }
  report("monotone_max_increase", worst_increase, worst_increase <= 1e-10);
  report("proximity_min_gap", worst_gap, worst_gap >= -1e-9);
  if (kind != ProblemKind::Nmf) report("psd_gap_min", worst_psd, worst_psd >= -1e-8);
  const RateBoundReport rate = rate_bound_check(res.trace, cfg.lambda, cfg.eta);
  report("sublinear_slack", rate.sublinear_slack, rate.sublinear_holds);
  report("displacement_slack", rate.displacement_slack, rate.displacement_holds);
  const NuclearBound nb = nuclear_bound_check(res.factors);
  report("nuclear_slack", nb.frobenius_half - nb.nuclear, nb.nuclear <= nb.frobenius_half + 1e-9);
  if (kind == ProblemKind::Nmf)
    report("feasibility_min_entry",
           res.factors.rank() ? std::min(res.factors.u.minCoeff(), res.factors.v.minCoeff()) : 0.0,
           res.factors.rank() == 0 ||
               (res.factors.u.minCoeff() >= 0.0 && res.factors.v.minCoeff() >= 0.0));
  return ok ? kExitOk : kExitRuntime;
}

/// Full CLI: parse, run, map outcomes to exit codes.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<Options> opts;
  try {
    opts = parse_args(argc, argv, out);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!opts) return kExitOk;
  try {
    const Options& o = *opts;
    if (o.command == "synth") return run_synth(o, out);
    if (o.command == "bench") return run_bench(o, out);
    if (o.command == "verify") return run_verify(o, out);
    return run_solver(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace airls::cli

#endif  // AIRLS_CLI_HPP
