#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "nanotrap/landscape.hpp"
#include "nanotrap/tuner.hpp"

namespace nanotrap {
namespace report_detail {

// 17 significant digits: enough to reparse every double exactly.
inline void number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void vec3_array(std::string& out, const Vec3& v) {
  out += '[';
  number(out, v.x);
  out += ", ";
  number(out, v.y);
  out += ", ";
  number(out, v.z);
  out += ']';
}

}  // namespace report_detail

/// JSON extrema report. Keys are emitted in sorted order and floating-point
/// values with 17 significant digits, so reruns are byte-identical and every
/// value reparses exactly.
inline std::string write_extrema_report(const std::vector<Extremum>& extrema,
                                        const GridSpec& spec, PotentialMode mode,
                                        const std::string& scene_hash) {
  using report_detail::number;
  using report_detail::vec3_array;
  std::string out = "{\n  \"extrema\": [";
  for (std::size_t i = 0; i < extrema.size(); ++i) {
    const Extremum& e = extrema[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"index\": [" + std::to_string(e.index[0]) + ", " +
           std::to_string(e.index[1]) + ", " + std::to_string(e.index[2]) + "], ";
    out += "\"isolated_3d\": ";
    out += e.isolated_3d ? "true" : "false";
    out += ", \"kind\": \"";
    out += e.kind == ExtremumKind::Max ? "max" : "min";
    out += "\", \"position\": ";
    vec3_array(out, e.position);
    out += ", \"shell_margin\": ";
    number(out, e.shell_margin);
    out += ", \"value\": ";
    number(out, e.value);
    out += '}';
  }
  out += extrema.empty() ? "],\n" : "\n  ],\n";
  out += "  \"grid\": {\"counts\": [" + std::to_string(spec.counts[0]) + ", " +
         std::to_string(spec.counts[1]) + ", " + std::to_string(spec.counts[2]) + "], ";
  out += "\"mode\": \"";
  out += to_string(mode);
  out += "\", \"origin\": ";
  vec3_array(out, spec.origin);
  out += ", \"spacing\": ";
  vec3_array(out, spec.spacing);
  out += "},\n";
  out += "  \"scene_hash\": \"" + scene_hash + "\"\n}\n";
  return out;
}

/// JSON tuning result: optimized currents, objective before/after, the
/// evaluation count and the best-so-far trace.
inline std::string write_tune_report(const TuneResult& result, double initial_objective) {
  using report_detail::number;
  std::string out = "{\n  \"currents\": [";
  for (std::size_t i = 0; i < result.currents.size(); ++i) {
    if (i) out += ", ";
    number(out, result.currents[i]);
  }
  out += "],\n  \"evals\": " + std::to_string(result.evals) + ",\n";
  out += "  \"initial_objective\": ";
  number(out, initial_objective);
  out += ",\n  \"objective\": ";
  number(out, result.objective);
  out += ",\n  \"trace\": [";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    if (i) out += ", ";
    out += '[' + std::to_string(result.trace[i].first) + ", ";
    number(out, result.trace[i].second);
    out += ']';
  }
  out += "]\n}\n";
  return out;
}

}  // namespace nanotrap
