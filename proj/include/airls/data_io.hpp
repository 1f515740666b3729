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

#ifndef AIRLS_DATA_IO_HPP
#define AIRLS_DATA_IO_HPP

/**
 * @file data_io.hpp
 * @brief Synthetic instances, observation masks, and readers/writers for
 *        MatrixMarket, dense CSV and MovieLens rating files.
 */

#include "airls/core.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace airls {

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

enum class Distribution { Gaussian, Uniform01 };

inline Distribution parse_distribution(std::string_view s) {
  if (s == "gaussian") return Distribution::Gaussian;
  if (s == "uniform01" || s == "uniform") return Distribution::Uniform01;
  throw Error(ErrorKind::InvalidParameter, "unknown distribution '" + std::string(s) + "'");
}

struct LowRankInstance {
  Matrix x0;
  Matrix u0;
  Matrix v0;
};

/// X0 = U0 V0^T, factor entries N(0,1) or U[0,1).
inline LowRankInstance gen_lowrank_factors(Index m, Index n, Index r, Distribution dist,
                                           std::uint64_t seed) {
  require(m > 0 && n > 0, ErrorKind::InvalidParameter, "dimensions must be positive");
  require(r >= 1 && r <= std::min(m, n), ErrorKind::InvalidParameter,
          "rank must lie in [1, min(m, n)]");
  std::mt19937_64 rng = make_rng(seed, RngStream::Factors);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto draw = [&](Index rows) {
    Matrix f(rows, r);
    for (Index j = 0; j < r; ++j)
      for (Index i = 0; i < rows; ++i)
        f(i, j) = dist == Distribution::Gaussian ? normal(rng) : uniform(rng);
    return f;
  };
  LowRankInstance out;
  out.u0 = draw(m);
  out.v0 = draw(n);
  out.x0 = out.u0 * out.v0.transpose();
  return out;
}

inline Matrix gen_lowrank(Index m, Index n, Index r, Distribution dist, std::uint64_t seed) {
  return gen_lowrank_factors(m, n, r, dist, seed).x0;
}

/**
 * Y = X0 + N with N_ij ~ N(0, sigma^2), sigma^2 = ||X0||_F^2 / (m n 10^(snr/10)).
 * snr_db = +infinity returns X0 unchanged.
 */
inline Matrix add_noise_snr(const Matrix& x0, double snr_db, std::uint64_t seed) {
  require(x0.allFinite(), ErrorKind::InvalidInput, "X0 has non-finite entries");
  require(!std::isnan(snr_db), ErrorKind::InvalidParameter, "SNR must not be NaN");
  if (std::isinf(snr_db) && snr_db > 0.0) return x0;
  const double mn = static_cast<double>(x0.size());
  const double sigma = std::sqrt(x0.squaredNorm() / (mn * std::pow(10.0, snr_db / 10.0)));
  std::mt19937_64 rng = make_rng(seed, RngStream::Noise);
  std::normal_distribution<double> normal(0.0, sigma);
  Matrix y = x0;
  for (Index j = 0; j < y.cols(); ++j)
    for (Index i = 0; i < y.rows(); ++i) y(i, j) += normal(rng);
  return y;
}

/// card(Omega) giving the degrees-of-freedom ratio `fr` for rank r on n x n.
inline std::size_t card_for_freedom_ratio(Index r, Index n, double fr) {
  require(fr > 0.0, ErrorKind::InvalidParameter, "FR must be positive");
  require(r >= 1 && r <= n, ErrorKind::InvalidParameter, "need 1 <= r <= n");
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(r) * static_cast<double>(2 * n - r) / fr));
}

/// `card` distinct positions drawn uniformly (Floyd's algorithm).
inline ObservedMask sample_mask(Index m, Index n, std::size_t card, std::uint64_t seed) {
  require(m > 0 && n > 0, ErrorKind::InvalidParameter, "dimensions must be positive");
  const auto total = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);
  require(card >= 1 && card <= total, ErrorKind::InvalidParameter,
          "card must lie in [1, m * n]");
  std::mt19937_64 rng = make_rng(seed, RngStream::Mask);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(card * 2);
  for (std::uint64_t j = total - card; j < total; ++j) {
    std::uniform_int_distribution<std::uint64_t> pick(0, j);
    const std::uint64_t t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<Entry> entries;
  entries.reserve(card);
  for (std::uint64_t lin : chosen)
    entries.push_back({static_cast<Index>(lin / static_cast<std::uint64_t>(n)),
                       static_cast<Index>(lin % static_cast<std::uint64_t>(n))});
  return ObservedMask(m, n, std::move(entries));
}

// ---------------------------------------------------------------------------
// Sparse triples
// ---------------------------------------------------------------------------

struct Triple {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Largest m * n that is ever densified.
inline constexpr Index kMaxDenseEntries = 10'000'000;

struct SparseData {
  Index rows = 0;
  Index cols = 0;
  std::vector<Triple> triples;
  std::size_t duplicates = 0;

  ObservedMask mask() const {
    std::vector<Entry> e;
    e.reserve(triples.size());
    for (const Triple& t : triples) e.push_back({t.row, t.col});
    return ObservedMask(rows, cols, std::move(e));
  }

  /// Zero-filled dense matrix holding the observed values.
  Matrix dense() const {
    require(rows * cols <= kMaxDenseEntries, ErrorKind::SizeGuard,
            "matrix too large to densify");
    Matrix out = Matrix::Zero(rows, cols);
    for (const Triple& t : triples) out(t.row, t.col) = t.value;
    return out;
  }
};

namespace detail {

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

template <class T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  tok = trim(tok);
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (tok.empty() || res.ec != std::errc() || res.ptr != last)
    parse_fail(line, std::string("expected ") + what + ", got '" + std::string(tok) + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) parse_fail(line, "non-finite value '" + std::string(tok) + "'");
  }
  return value;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::IoError, "cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::IoError, "cannot open '" + path + "' for writing");
  return out;
}

inline void finish_write(std::ostream& out, const std::string& what) {
  out.flush();
  require(out.good(), ErrorKind::IoError, "failed writing " + what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MovieLens
// ---------------------------------------------------------------------------

/**
 * Reads "user \t item \t rating \t timestamp" lines with 1-based ids and
 * integer ratings 1..5. A repeated (user, item) keeps the last rating and
 * bumps `duplicates`. Dimensions are the largest ids seen, or at least
 * min_rows x min_cols.
 */
inline SparseData read_movielens(std::istream& in, Index min_rows = 0, Index min_cols = 0) {
  SparseData out;
  std::map<std::pair<Index, Index>, std::size_t> where;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (detail::trim(view).empty()) continue;
    const auto fields = detail::split(view, '\t');
    if (fields.size() != 4)
      detail::parse_fail(lineno, "expected 4 tab-separated fields, got " +
                                     std::to_string(fields.size()));
    const auto user = detail::parse_number<long long>(fields[0], lineno, "integer user id");
    const auto item = detail::parse_number<long long>(fields[1], lineno, "integer item id");
    const auto rating = detail::parse_number<long long>(fields[2], lineno, "integer rating");
    (void)detail::parse_number<long long>(fields[3], lineno, "integer timestamp");
    if (user < 1 || item < 1) detail::parse_fail(lineno, "ids must be at least 1");
    if (rating < 1 || rating > 5) detail::parse_fail(lineno, "rating outside 1..5");
    const Index r = static_cast<Index>(user - 1);
    const Index c = static_cast<Index>(item - 1);
    out.rows = std::max(out.rows, r + 1);
    out.cols = std::max(out.cols, c + 1);
    const auto [it, fresh] = where.try_emplace({r, c}, out.triples.size());
    if (fresh) {
      out.triples.push_back({r, c, static_cast<double>(rating)});
    } else {
      out.triples[it->second].value = static_cast<double>(rating);
      ++out.duplicates;
    }
  }
  if (out.triples.empty()) detail::parse_fail(lineno, "no ratings found");
  out.rows = std::max(out.rows, min_rows);
  out.cols = std::max(out.cols, min_cols);
  return out;
}

inline SparseData read_movielens(const std::string& path, Index min_rows = 0,
                                 Index min_cols = 0) {
  auto in = detail::open_in(path);
  return read_movielens(in, min_rows, min_cols);
}

// ---------------------------------------------------------------------------
// MatrixMarket
// ---------------------------------------------------------------------------

inline constexpr const char* kMatrixMarketCoordinateHeader =
    "%%MatrixMarket matrix coordinate real general";
inline constexpr const char* kMatrixMarketArrayHeader = "%%MatrixMarket matrix array real general";

enum class MatrixMarketFormat { Coordinate, Array };

struct MatrixMarketData {
  MatrixMarketFormat format = MatrixMarketFormat::Array;
  Index rows = 0;
  Index cols = 0;
  std::vector<Triple> triples;  // coordinate files only
  Matrix dense;                 // always filled (zeros off the coordinate pattern)
};

inline MatrixMarketData read_matrix_market(std::istream& in) {
  MatrixMarketData out;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) detail::parse_fail(1, "empty file");
  ++lineno;
  const std::string_view header = detail::trim(line);
  if (header == kMatrixMarketCoordinateHeader)
    out.format = MatrixMarketFormat::Coordinate;
  else if (header == kMatrixMarketArrayHeader)
    out.format = MatrixMarketFormat::Array;
  else
    detail::parse_fail(lineno, "unsupported MatrixMarket header '" + std::string(header) + "'");

  // Size line, after comments.
  std::vector<std::string_view> tok;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view v = detail::trim(line);
    if (v.empty() || v.front() == '%') continue;
    tok = detail::split_ws(v);
    break;
  }
  const std::size_t want = out.format == MatrixMarketFormat::Coordinate ? 3 : 2;
  if (tok.size() != want)
    detail::parse_fail(lineno, "size line must have " + std::to_string(want) + " fields");
  out.rows = detail::parse_number<Index>(tok[0], lineno, "row count");
  out.cols = detail::parse_number<Index>(tok[1], lineno, "column count");
  if (out.rows < 1 || out.cols < 1) detail::parse_fail(lineno, "dimensions must be positive");
  require(out.rows * out.cols <= kMaxDenseEntries, ErrorKind::SizeGuard,
          "matrix too large to densify");
  out.dense = Matrix::Zero(out.rows, out.cols);

  const Index expected = out.format == MatrixMarketFormat::Coordinate
                             ? detail::parse_number<Index>(tok[2], lineno, "entry count")
                             : out.rows * out.cols;
  if (expected < 0) detail::parse_fail(lineno, "negative entry count");
  Index seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view v = detail::trim(line);
    if (v.empty() || v.front() == '%') continue;
    if (seen >= expected) detail::parse_fail(lineno, "more entries than declared");
    tok = detail::split_ws(v);
    if (out.format == MatrixMarketFormat::Coordinate) {
      if (tok.size() != 3) detail::parse_fail(lineno, "coordinate entry needs 3 fields");
      const Index i = detail::parse_number<Index>(tok[0], lineno, "row index");
      const Index j = detail::parse_number<Index>(tok[1], lineno, "column index");
      const double x = detail::parse_number<double>(tok[2], lineno, "value");
      if (i < 1 || i > out.rows || j < 1 || j > out.cols)
        detail::parse_fail(lineno, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                       ") out of bounds for " + std::to_string(out.rows) + "x" +
                                       std::to_string(out.cols));
      out.triples.push_back({i - 1, j - 1, x});
      out.dense(i - 1, j - 1) = x;
    } else {
      if (tok.size() != 1) detail::parse_fail(lineno, "array entry needs 1 field");
      const double x = detail::parse_number<double>(tok[0], lineno, "value");
      out.dense(seen % out.rows, seen / out.rows) = x;  // column-major
    }
    ++seen;
  }
  if (seen != expected)
    detail::parse_fail(lineno, "expected " + std::to_string(expected) + " entries, found " +
                                   std::to_string(seen));
  return out;
}

inline MatrixMarketData read_matrix_market(const std::string& path) {
  auto in = detail::open_in(path);
  return read_matrix_market(in);
}

inline void write_matrix_market_array(std::ostream& out, const Matrix& m) {
  out << kMatrixMarketArrayHeader << '\n' << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out << detail::format_double(m(i, j)) << '\n';
}

inline void write_matrix_market_array(const std::string& path, const Matrix& m) {
  auto out = detail::open_out(path);
  write_matrix_market_array(out, m);
  detail::finish_write(out, path);
}

inline void write_matrix_market_coordinate(std::ostream& out, Index rows, Index cols,
                                           const std::vector<Triple>& triples) {
  out << kMatrixMarketCoordinateHeader << '\n'
      << rows << ' ' << cols << ' ' << triples.size() << '\n';
  for (const Triple& t : triples) {
    require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols, ErrorKind::InvalidInput,
            "triple outside the declared dimensions");
    out << t.row + 1 << ' ' << t.col + 1 << ' ' << detail::format_double(t.value) << '\n';
  }
}

inline void write_matrix_market_coordinate(const std::string& path, Index rows, Index cols,
                                           const std::vector<Triple>& triples) {
  auto out = detail::open_out(path);
  write_matrix_market_coordinate(out, rows, cols, triples);
  detail::finish_write(out, path);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline Matrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view v = detail::trim(line);
    if (v.empty()) continue;
    std::vector<double> row;
    for (std::string_view tok : detail::split(v, ','))
      row.push_back(detail::parse_number<double>(tok, lineno, "number"));
    if (!rows.empty() && row.size() != rows.front().size())
      detail::parse_fail(lineno, "expected " + std::to_string(rows.front().size()) +
                                     " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) detail::parse_fail(lineno, "no data rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline Matrix read_csv(const std::string& path) {
  auto in = detail::open_in(path);
  return read_csv(in);
}

inline void write_csv(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const Matrix& m) {
  auto out = detail::open_out(path);
  write_csv(out, m);
  detail::finish_write(out, path);
}

}  // namespace airls

#endif  // AIRLS_DATA_IO_HPP
