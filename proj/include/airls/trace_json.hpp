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

#ifndef AIRLS_TRACE_JSON_HPP
#define AIRLS_TRACE_JSON_HPP

// JSON serialization of a solver run: config, per-iteration records, prune
// events, final status and metrics. Keys are emitted in a fixed order so that
// identical runs produce identical files.

#include "airls/solver_common.hpp"

#include "json.hpp"

#include <fstream>
#include <optional>
#include <string>

namespace airls {

using Json = nlohmann::ordered_json;

struct RunMetrics {
  std::optional<double> nre;
  std::optional<double> nmae;
};

inline Json config_to_json(const SolverConfig& cfg) {
  Json nmf;
  nmf["beta_u"] = cfg.nmf.beta_u;
  nmf["beta_v"] = cfg.nmf.beta_v;
  nmf["sigma"] = cfg.nmf.sigma;
  nmf["eps_active"] = cfg.nmf.eps_active;
  nmf["max_backtracks"] = cfg.nmf.max_backtracks;
  Json j;
  j["lambda"] = cfg.lambda;
  j["eta"] = cfg.eta;
  j["d_init"] = cfg.d_init;
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  j["prune_tol"] = cfg.prune_tol;
  j["seed"] = cfg.seed;
  j["nmf"] = std::move(nmf);
  return j;
}

/// With include_timing = false every "ms" is written as 0.
inline Json trace_to_json(const SolverConfig& cfg, const IterationTrace& trace,
                          const RunMetrics& metrics, bool include_timing = false) {
  Json iterations = Json::array();
  for (const IterationRecord& r : trace.iterations) {
    Json it;
    it["k"] = r.k;
    it["objective"] = r.objective;
    it["d"] = r.d;
    it["rel_change"] = r.rel_change;
    it["delta"] = r.delta;
    it["ms"] = include_timing ? r.ms : 0.0;
    iterations.push_back(std::move(it));
  }
  Json prunes = Json::array();
  for (const PruneEvent& p : trace.prunes) {
    Json ev;
    ev["k"] = p.iteration;
    ev["removed"] = p.removed;
    ev["norms"] = p.norms;
    prunes.push_back(std::move(ev));
  }
  Json m;
  m["nre"] = metrics.nre ? Json(*metrics.nre) : Json(nullptr);
  m["nmae"] = metrics.nmae ? Json(*metrics.nmae) : Json(nullptr);

  Json doc;
  doc["config"] = config_to_json(cfg);
  doc["iterations"] = std::move(iterations);
  doc["prunes"] = std::move(prunes);
  doc["status"] = to_string(trace.status);
  doc["metrics"] = std::move(m);
  return doc;
}

inline void write_trace(const std::string& path, const SolverConfig& cfg,
                        const IterationTrace& trace, const RunMetrics& metrics,
                        bool include_timing = false) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::InvalidInput, "cannot open '" + path + "' for writing");
  out << trace_to_json(cfg, trace, metrics, include_timing).dump(2) << '\n';
  out.flush();
  require(out.good(), ErrorKind::InvalidInput, "failed writing " + path);
}

/**
 * Structural check of a trace document; returns an empty string when valid,
 * otherwise a description of the first problem found.
 */
inline std::string validate_trace_json(const Json& doc) {
  auto is_num = [](const Json& v) { return v.is_number(); };
  if (!doc.is_object()) return "document is not an object";
  for (const char* key : {"config", "iterations", "prunes", "status", "metrics"})
    if (!doc.contains(key)) return std::string("missing key '") + key + "'";
  const Json& cfg = doc["config"];
  for (const char* key : {"lambda", "eta", "d_init", "tol", "max_iter", "prune_tol", "seed"})
    if (!cfg.contains(key) || !is_num(cfg[key])) return std::string("config.") + key + " invalid";
  if (!doc["iterations"].is_array()) return "iterations is not an array";
  for (const Json& it : doc["iterations"]) {
    if (!it.contains("k") || !it["k"].is_number_integer()) return "iteration k invalid";
    if (!it.contains("d") || !it["d"].is_number_integer()) return "iteration d invalid";
    for (const char* key : {"objective", "rel_change", "delta", "ms"})
      if (!it.contains(key) || !is_num(it[key])) return std::string("iteration ") + key + " invalid";
  }
  if (!doc["prunes"].is_array()) return "prunes is not an array";
  for (const Json& p : doc["prunes"]) {
    if (!p.contains("k") || !p["k"].is_number_integer()) return "prune k invalid";
    if (!p.contains("removed") || !p["removed"].is_array()) return "prune removed invalid";
    if (!p.contains("norms") || !p["norms"].is_array()) return "prune norms invalid";
  }
  const Json& status = doc["status"];
  if (!status.is_string() ||
      (status != "converged" && status != "max_iter" && status != "degenerate"))
    return "status invalid";
  const Json& m = doc["metrics"];
  for (const char* key : {"nre", "nmae"})
    if (!m.contains(key) || !(m[key].is_null() || is_num(m[key])))
      return std::string("metrics.") + key + " invalid";
  return {};
}

}  // namespace airls

#endif  // AIRLS_TRACE_JSON_HPP
