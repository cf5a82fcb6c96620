#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "brolin/config.hpp"
#include "brolin/equilibrium.hpp"
#include "brolin/errors.hpp"
#include "brolin/lemniscate.hpp"
#include "brolin/rational_map.hpp"
#include "brolin/verdict.hpp"

#ifndef BROLIN_VERSION
#define BROLIN_VERSION "1.0.0"
#endif

namespace brolin::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "brolin-report/1";
inline constexpr const char* kToolVersion = BROLIN_VERSION;

// ---- primitives -------------------------------------------------------------

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Complex> coeffs_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty array of [re, im] pairs");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline json coeffs_to_json(const std::vector<Complex>& c) {
  json a = json::array();
  for (const auto& z : c) a.push_back(complex_to_json(z));
  return a;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline json read_json(const std::string& path) { return parse_json(read_text(path), path); }

/// %.17g, the shortest form that round-trips every double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- maps --------------------------------------------------------------------

struct MapFile {
  std::string id;
  std::vector<Complex> numerator, denominator;

  RationalMap build(const Tolerances& tol = {}) const { return RationalMap(numerator, denominator, tol); }
};

/// {"id"?: str, "numerator": [[re, im], ...], "denominator": [...]}, ascending powers.
inline MapFile map_from_json(const json& j, const std::string& where = "map") {
  if (!j.is_object()) throw ParseError(where + ": a map is a JSON object");
  if (!j.contains("numerator") || !j.contains("denominator"))
    throw ParseError(where + ": needs \"numerator\" and \"denominator\"");
  MapFile m;
  m.id = j.value("id", std::string("map"));
  m.numerator = coeffs_from_json(j["numerator"], where + ".numerator");
  m.denominator = coeffs_from_json(j["denominator"], where + ".denominator");
  return m;
}

inline json map_to_json(const MapFile& m) {
  return {{"id", m.id}, {"numerator", coeffs_to_json(m.numerator)}, {"denominator", coeffs_to_json(m.denominator)}};
}

inline json map_to_json(const RationalMap& f, const std::string& id = "map") {
  const auto n = f.numerator().coeffs(), d = f.denominator().coeffs();
  return map_to_json(MapFile{id, {n.begin(), n.end()}, {d.begin(), d.end()}});
}

inline MapFile read_map_file(const std::string& path) {
  auto m = map_from_json(read_json(path), path);
  if (m.id == "map") {
    const auto slash = path.find_last_of("/\\");
    auto stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos) stem.resize(dot);
    m.id = stem;
  }
  return m;
}

inline RationalMap parse_map_file(const std::string& path, const Tolerances& tol = {}) {
  return read_map_file(path).build(tol);
}

// ---- tolerances and config ------------------------------------------------------

inline json tolerances_to_json(const Tolerances& t) {
  return {{"lead", t.lead},
          {"res", t.res},
          {"gcd", t.gcd},
          {"form", t.form},
          {"root_residual", t.root_residual},
          {"root_max_iter", t.root_max_iter},
          {"cluster", t.cluster},
          {"escape", t.escape},
          {"escape_depth", t.escape_depth},
          {"pole_guard", t.pole_guard},
          {"trace", t.trace},
          {"normalization", t.normalization},
          {"infinity_chordal", t.infinity_chordal}};
}

/// Overrides the named fields of `t`; unknown names are rejected.
inline void apply_tolerances(const json& j, Tolerances& t, const std::string& where = "tolerances") {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, v] : j.items()) {
    if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
    if (key == "lead") t.lead = v.get<double>();
    else if (key == "res") t.res = v.get<double>();
    else if (key == "gcd") t.gcd = v.get<double>();
    else if (key == "form") t.form = v.get<double>();
    else if (key == "root_residual") t.root_residual = v.get<double>();
    else if (key == "root_max_iter") t.root_max_iter = v.get<int>();
    else if (key == "cluster") t.cluster = v.get<double>();
    else if (key == "escape") t.escape = v.get<double>();
    else if (key == "escape_depth") t.escape_depth = v.get<int>();
    else if (key == "pole_guard") t.pole_guard = v.get<double>();
    else if (key == "trace") t.trace = v.get<double>();
    else if (key == "normalization") t.normalization = v.get<double>();
    else if (key == "infinity_chordal") t.infinity_chordal = v.get<double>();
    else throw ValidationError(where + ": unknown tolerance '" + key + "'");
  }
}

inline json bbox_to_json(const BBox& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

inline BBox bbox_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw ParseError(where + ": bbox is [x0, y0, x1, y1]");
  for (const auto& v : j)
    if (!v.is_number()) throw ParseError(where + ": bbox entries must be numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline json config_to_json(const Config& c) {
  json j{{"seed", c.seed},
         {"samples", c.samples},
         {"walkers", c.walkers},
         {"depth", c.depth},
         {"burn_in", c.burn_in},
         {"chains", c.chains},
         {"grid", json::array({c.nx, c.ny})},
         {"trace_grid", json::array({c.trace_nx, c.trace_ny})},
         {"threads", c.threads},
         {"tolerances", tolerances_to_json(c.tolerances)}};
  j["bbox"] = c.bbox ? bbox_to_json(*c.bbox) : json(nullptr);
  return j;
}

inline Config config_from_json(const json& j, const std::string& where = "config") {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  Config c;
  auto grid = [&](const json& g, const std::string& key, int& x, int& y) {
    if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer())
      throw ParseError(where + "." + key + ": expected [nx, ny]");
    x = g[0].get<int>();
    y = g[1].get<int>();
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "samples") c.samples = v.get<std::size_t>();
      else if (key == "walkers") c.walkers = v.get<std::size_t>();
      else if (key == "depth") c.depth = v.get<int>();
      else if (key == "burn_in") c.burn_in = v.get<int>();
      else if (key == "chains") c.chains = v.get<int>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "grid") grid(v, key, c.nx, c.ny);
      else if (key == "trace_grid") grid(v, key, c.trace_nx, c.trace_ny);
      else if (key == "bbox") { if (!v.is_null()) c.bbox = bbox_from_json(v, where + ".bbox"); }
      else if (key == "tolerances") apply_tolerances(v, c.tolerances, where + ".tolerances");
      else if (key == "outputs") continue;  // paths are the caller's business
      else throw ValidationError(where + ": unknown key '" + key + "'");
    }
  } catch (const json::type_error& e) {
    throw ParseError(where + ": " + e.what());
  }
  c.validate();
  return c;
}

// ---- point clouds ---------------------------------------------------------------

inline std::string measure_to_csv(const EmpiricalMeasure& m) {
  std::string s = "re,im,weight\n";
  for (std::size_t i = 0; i < m.size(); ++i)
    s += fmt(m.points[i].real()) + "," + fmt(m.points[i].imag()) + "," + fmt(m.weights[i]) + "\n";
  return s;
}

inline void write_measure_csv(const std::string& path, const EmpiricalMeasure& m) { write_text(path, measure_to_csv(m)); }

inline std::string trace_to_csv(const LevelSetTrace& t) {
  std::string s = "polyline,closed,re,im\n";
  for (std::size_t k = 0; k < t.polylines.size(); ++k)
    for (const auto& v : t.polylines[k])
      s += std::to_string(k) + "," + (t.closed[k] ? "1" : "0") + "," + fmt(v.real()) + "," + fmt(v.imag()) + "\n";
  return s;
}

// ---- rasters --------------------------------------------------------------------

/// 16-bit big-endian P5 bytes for a row-major grid, rescaled so min -> 0 and
/// max -> 65535. A constant grid maps to 0.
inline std::string raster_to_pgm(const std::vector<double>& values, int nx, int ny, double& lo, double& hi) {
  if (nx < 1 || ny < 1 || values.size() != static_cast<std::size_t>(nx) * ny)
    throw ValidationError("raster size does not match nx * ny");
  lo = values[0];
  hi = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("raster values must be finite");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::string out = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n65535\n";
  out.reserve(out.size() + 2 * values.size());
  for (double v : values) {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    const auto px = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    out.push_back(static_cast<char>(px >> 8));
    out.push_back(static_cast<char>(px & 0xFF));
  }
  return out;
}

inline void emit_raster(const std::vector<double>& values, int nx, int ny, const std::string& path,
                        const std::string& sidecar) {
  double lo = 0.0, hi = 0.0;
  const auto bytes = raster_to_pgm(values, nx, ny, lo, hi);
  write_text(path, bytes);
  write_text(sidecar, json{{"min", lo}, {"max", hi}, {"nx", nx}, {"ny", ny}}.dump(2) + "\n");
}

// ---- reports ---------------------------------------------------------------------

inline json envelope(const json& config_echo, const json& payload, const json& timings = json::object()) {
  return {{"schema_version", kSchemaVersion},
          {"tool_version", kToolVersion},
          {"config", config_echo},
          {"timings", timings},
          {"payload", payload}};
}

inline json spread_to_json(const SpreadStatistic& s) {
  return {{"max_p", s.max_p}, {"min_p", s.min_p}, {"mean_p", s.mean_p}, {"spread", s.spread}, {"count", s.count}};
}

inline json claims_to_json(const ClaimStatistics& s) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"julia_containment", num(s.julia_containment)},
          {"level_coincidence", num(s.level_coincidence)},
          {"forward_invariance", num(s.forward_invariance)},
          {"doubling", num(s.doubling)}};
}

inline json point_to_json(const ProjectivePoint& p) {
  if (p.is_infinity()) return "inf";
  return complex_to_json(p.to_affine());
}

inline json algebraic_to_json(const AlgebraicSide& a) {
  json j{{"is_poly", a.is_poly}, {"is_square_poly", a.is_square_poly}};
  j["special_form"] = a.special_form
                          ? json{{"a", complex_to_json(a.special_form->a)}, {"b", complex_to_json(a.special_form->b)}}
                          : json(nullptr);
  json e = json::array();
  for (const auto& p : a.exceptional) e.push_back(point_to_json(p));
  j["exceptional_set"] = e;
  return j;
}

/// Verdict payload; timings are kept out so the payload is reproducible.
inline json report_to_json(const VerdictReport& r) {
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  json j{{"map_id", r.map_id},
         {"d", r.d},
         {"algebraic", algebraic_to_json(r.algebraic)},
         {"infinity_in_fatou", r.infinity_in_fatou},
         {"spread", r.spread ? spread_to_json(*r.spread) : json(nullptr)},
         {"harmonic_discrepancy", opt(r.harmonic_discrepancy)},
         {"energy", opt(r.energy)},
         {"base_height", opt(r.base_height)},
         {"lemniscate_c", opt(r.lemniscate_c)},
         {"lemniscate_checks", r.claims ? claims_to_json(*r.claims) : json(nullptr)},
         {"consistent", r.consistent},
         {"status", to_string(r.status)},
         {"thresholds",
          {{"tau_spread", r.tau_spread}, {"equality_band", r.equality_band}, {"calibration", calibration::kVersion}}},
         {"seeds", {{"sampler", r.sampler_seed}, {"harmonic", r.harmonic_seed}}},
         {"notes", r.notes}};
  j["bbox"] = r.bbox ? bbox_to_json(*r.bbox) : json(nullptr);
  j["walker_stats"] = r.walker_stats ? json{{"mean_steps", r.walker_stats->mean_steps},
                                            {"max_steps", r.walker_stats->max_steps},
                                            {"abandoned", r.walker_stats->abandoned}}
                                     : json(nullptr);
  j["failure"] = r.failure ? json{{"stage", r.failure->stage},
                                  {"category", r.failure->category},
                                  {"kind", r.failure->kind},
                                  {"message", r.failure->message}}
                           : json(nullptr);
  return j;
}

inline json timings_to_json(const VerdictReport& r) {
  json t = json::object();
  for (const auto& [k, v] : r.timings) t[k] = v;
  return t;
}

/// One row per map; fixed %.6e formatting keeps the file byte-stable.
inline std::string suite_csv(const std::vector<VerdictReport>& reports) {
  std::string s = "map_id,d,is_poly,is_square_poly,infinity_in_fatou,spread,harmonic_discrepancy,energy,status,consistent\n";
  char buf[64];
  auto e = [&](const std::optional<double>& v) {
    if (!v) return std::string("nan");
    std::snprintf(buf, sizeof buf, "%.6e", *v);
    return std::string(buf);
  };
  for (const auto& r : reports) {
    s += r.map_id + "," + std::to_string(r.d) + "," + (r.algebraic.is_poly ? "1" : "0") + "," +
         (r.algebraic.is_square_poly ? "1" : "0") + "," + (r.infinity_in_fatou ? "1" : "0") + "," +
         e(r.spread ? std::optional<double>(r.spread->spread) : std::nullopt) + "," + e(r.harmonic_discrepancy) + "," +
         e(r.energy) + "," + to_string(r.status) + "," + (r.consistent ? "1" : "0") + "\n";
  }
  return s;
}

}  // namespace brolin::io
