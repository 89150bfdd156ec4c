#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nanotrap/errors.hpp"
#include "nanotrap/landscape.hpp"
#include "nanotrap/scene.hpp"

namespace nanotrap {
namespace config_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

enum class Dimension { None, Length, Current, Frequency };

struct Suffix {
  std::string_view text;
  double factor;
};

// Longest suffixes first; the micro sign is accepted as u, U+00B5 or U+03BC.
inline std::span<const Suffix> suffixes(Dimension d) {
  static const Suffix length[] = {{"\xC2\xB5m", 1e-6}, {"\xCE\xBCm", 1e-6}, {"nm", 1e-9},
                                  {"um", 1e-6},        {"mm", 1e-3},        {"m", 1.0}};
  static const Suffix current[] = {{"\xC2\xB5""A", 1e-6}, {"\xCE\xBC""A", 1e-6},
                                   {"nA", 1e-9},          {"uA", 1e-6},
                                   {"mA", 1e-3},          {"A", 1.0}};
  static const Suffix frequency[] = {{"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}};
  switch (d) {
    case Dimension::Length: return length;
    case Dimension::Current: return current;
    case Dimension::Frequency: return frequency;
    default: return {};
  }
}

inline bool parse_plain_double(std::string_view text, double& out) {
  const std::string buf(text);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end != buf.c_str() && *end == '\0' && std::isfinite(out);
}

/// A number with an optional unit suffix of the given dimension.
inline double parse_quantity(std::string_view text, Dimension dim, int line) {
  text = trim(text);
  if (text.empty()) throw ParseError(line, "empty value");
  for (const Suffix& s : suffixes(dim)) {
    if (text.size() > s.text.size() && text.ends_with(s.text)) {
      double v;
      const std::string_view num = trim(text.substr(0, text.size() - s.text.size()));
      if (!parse_plain_double(num, v))
        throw ParseError(line, "malformed number '" + std::string(num) + "'");
      return v * s.factor;
    }
  }
  double v;
  if (!parse_plain_double(text, v))
    throw ParseError(line, "malformed number '" + std::string(text) + "'");
  return v;
}

inline std::vector<double> parse_quantity_list(std::string_view text, Dimension dim, int line) {
  std::vector<double> out;
  std::size_t start = 0;
  const std::string s(text);
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string_view item =
        comma == std::string::npos ? std::string_view(s).substr(start)
                                   : std::string_view(s).substr(start, comma - start);
    out.push_back(parse_quantity(item, dim, line));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline Vec3 parse_point(std::string_view text, int line) {
  const auto v = parse_quantity_list(text, Dimension::Length, line);
  if (v.size() != 3) throw ParseError(line, "expected 3 coordinates");
  return {v[0], v[1], v[2]};
}

inline long parse_integer(std::string_view text, int line) {
  const std::string buf{trim(text)};
  char* end = nullptr;
  const long v = std::strtol(buf.c_str(), &end, 10);
  if (end == buf.c_str() || *end != '\0')
    throw ParseError(line, "malformed integer '" + buf + "'");
  return v;
}

struct Entry {
  std::string value;
  int line;
};

class KeyTable {
 public:
  void insert(const std::string& key, const std::string& value, int line) {
    if (entries_.count(key)) throw ParseError(line, "duplicate field '" + key + "'");
    entries_[key] = {value, line};
    order_.push_back(key);
  }

  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    consumed_.insert(key);
    return &it->second;
  }

  const Entry& require(const std::string& key) {
    const Entry* e = find(key);
    if (!e) throw ConfigError("missing required field '" + key + "'");
    return *e;
  }

  bool has_prefix(const std::string& prefix) const {
    for (const auto& [k, e] : entries_)
      if (k.starts_with(prefix)) return true;
    return false;
  }

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const std::string& k : order_)
      if (k.starts_with(prefix)) out.push_back(k);
    return out;
  }

  void reject_unconsumed() const {
    for (const std::string& k : order_)
      if (!consumed_.count(k))
        throw ParseError(entries_.at(k).line, "unknown field '" + k + "'");
  }

 private:
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::set<std::string> consumed_;
};

inline KeyTable tokenize(std::string_view text) {
  KeyTable table;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ParseError(line_no, "expected 'field = value'");
      const std::string key{trim(line.substr(0, eq))};
      const std::string value{trim(line.substr(eq + 1))};
      if (key.empty()) throw ParseError(line_no, "empty field name");
      table.insert(key, value, line_no);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return table;
}

inline std::array<double, 4> quantity_array4(const Entry& e, Dimension dim) {
  const auto v = parse_quantity_list(e.value, dim, e.line);
  if (v.size() != 4) throw ParseError(e.line, "expected 4 comma-separated currents");
  return {v[0], v[1], v[2], v[3]};
}

struct CommonSettings {
  AtomSpecies species;
  PhysicalConstants constants;
  double standoff = Scene::kDefaultStandoff;
  double omega_rf = 0.0;
};

inline CommonSettings parse_common(KeyTable& t) {
  CommonSettings c;
  if (const Entry* e = t.find("species.g_f"))
    c.species.g_f = parse_quantity(e->value, Dimension::None, e->line);
  if (const Entry* e = t.find("species.m_f"))
    c.species.m_f = static_cast<int>(parse_integer(e->value, e->line));
  if (const Entry* e = t.find("constants.mu0"))
    c.constants.mu0 = parse_quantity(e->value, Dimension::None, e->line);
  if (const Entry* e = t.find("constants.mu_b"))
    c.constants.mu_b = parse_quantity(e->value, Dimension::None, e->line);
  if (const Entry* e = t.find("constants.hbar"))
    c.constants.hbar = parse_quantity(e->value, Dimension::None, e->line);
  if (const Entry* e = t.find("standoff"))
    c.standoff = parse_quantity(e->value, Dimension::Length, e->line);
  const Entry* freq = t.find("rf_frequency");
  const Entry* omega = t.find("rf_omega");
  if (freq && omega)
    throw ParseError(omega->line, "rf_frequency and rf_omega are mutually exclusive");
  if (freq)
    c.omega_rf = (2.0 * std::numbers::pi) * parse_quantity(freq->value, Dimension::Frequency,
                                                           freq->line);
  if (omega) c.omega_rf = parse_quantity(omega->value, Dimension::None, omega->line);
  return c;
}

inline Scene parse_four_tube(KeyTable& t, const CommonSettings& c) {
  const Entry& de = t.require("four_tube_cell.d");
  const double d = parse_quantity(de.value, Dimension::Length, de.line);
  const Entry& he = t.require("four_tube_cell.h");
  const double h = parse_quantity(he.value, Dimension::Length, he.line);
  const auto i_dc = quantity_array4(t.require("four_tube_cell.i_dc"), Dimension::Current);
  const auto i_rf = quantity_array4(t.require("four_tube_cell.i_rf"), Dimension::Current);
  return build_four_tube_cell(d, h, i_dc, i_rf, c.omega_rf, c.species, c.constants, c.standoff);
}

inline Scene parse_crossed_grid(KeyTable& t, const CommonSettings& c,
                                double* h_out = nullptr) {
  auto list = [&](const char* key, Dimension dim) {
    const Entry& e = t.require(key);
    return parse_quantity_list(e.value, dim, e.line);
  };
  const Entry& he = t.require("crossed_grid.h");
  const double h = parse_quantity(he.value, Dimension::Length, he.line);
  if (h_out) *h_out = h;
  return build_crossed_grid(list("crossed_grid.y_positions", Dimension::Length),
                            list("crossed_grid.z_positions", Dimension::Length), h,
                            list("crossed_grid.i_dc_z", Dimension::Current),
                            list("crossed_grid.i_dc_y", Dimension::Current),
                            list("crossed_grid.i_rf_z", Dimension::Current),
                            list("crossed_grid.i_rf_y", Dimension::Current), c.omega_rf,
                            c.species, c.constants, c.standoff);
}

inline Scene parse_wire_list(KeyTable& t, const CommonSettings& c) {
  std::vector<Wire> ws;
  for (int n = 1;; ++n) {
    const std::string prefix = "wire." + std::to_string(n) + ".";
    if (!t.has_prefix(prefix)) break;
    std::string kind = "line";
    if (const Entry* e = t.find(prefix + "kind")) kind = e->value;
    double i_dc = 0.0, i_rf = 0.0, radius = kNanotubeRadius;
    if (const Entry* e = t.find(prefix + "i_dc"))
      i_dc = parse_quantity(e->value, Dimension::Current, e->line);
    if (const Entry* e = t.find(prefix + "i_rf"))
      i_rf = parse_quantity(e->value, Dimension::Current, e->line);
    if (const Entry* e = t.find(prefix + "radius"))
      radius = parse_quantity(e->value, Dimension::Length, e->line);
    if (kind == "line") {
      const Entry& pe = t.require(prefix + "point");
      const Entry& de = t.require(prefix + "direction");
      const Vec3 p = parse_point(pe.value, pe.line);
      const auto dv = parse_quantity_list(de.value, Dimension::None, de.line);
      if (dv.size() != 3) throw ParseError(de.line, "expected 3 direction components");
      ws.push_back(Wire::line(p, {dv[0], dv[1], dv[2]}, i_dc, i_rf, radius));
    } else if (kind == "segment") {
      const Entry& ae = t.require(prefix + "a");
      const Entry& be = t.require(prefix + "b");
      ws.push_back(Wire::segment(parse_point(ae.value, ae.line), parse_point(be.value, be.line),
                                 i_dc, i_rf, radius));
    } else {
      throw ConfigError("wire kind must be 'line' or 'segment'");
    }
  }
  if (ws.empty()) throw ConfigError("explicit wire list is empty (no wire.1.* fields)");
  return Scene(std::move(ws), c.omega_rf, c.species, c.constants, c.standoff);
}

inline void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void format_vec3(std::string& out, const Vec3& v) {
  format_double(out, v.x);
  out += ", ";
  format_double(out, v.y);
  out += ", ";
  format_double(out, v.z);
}

}  // namespace config_detail

/// Parses a declarative scene description. Keys are `field = value` lines
/// (# comments allowed); lengths, currents and frequencies accept
/// nm/um/mm/m, nA/uA/mA/A and Hz/kHz/MHz suffixes. The builder is selected
/// with `builder = four_tube_cell | crossed_grid | stacked | wires`.
/// Unknown, duplicate or malformed fields raise a located ParseError.
inline Scene parse_scene_config(std::string_view text) {
  using namespace config_detail;
  KeyTable t = tokenize(text);
  const CommonSettings c = parse_common(t);
  const Entry& builder = t.require("builder");
  Scene scene = [&] {
    if (builder.value == "four_tube_cell") return parse_four_tube(t, c);
    if (builder.value == "crossed_grid") return parse_crossed_grid(t, c);
    if (builder.value == "wires") return parse_wire_list(t, c);
    if (builder.value == "stacked") {
      const Entry& of = t.require("stacked.of");
      double h = 0.0;
      Scene base = [&] {
        if (of.value == "four_tube_cell") {
          const Entry& he = t.require("four_tube_cell.h");
          h = parse_quantity(he.value, Dimension::Length, he.line);
          return parse_four_tube(t, c);
        }
        if (of.value == "crossed_grid") return parse_crossed_grid(t, c, &h);
        throw ParseError(of.line, "stacked.of must be four_tube_cell or crossed_grid");
      }();
      const Entry& copies = t.require("stacked.copies");
      double pitch = 2.0 * h;  // one bilayer period
      if (const Entry* e = t.find("stacked.pitch"))
        pitch = parse_quantity(e->value, Dimension::Length, e->line);
      return stack_grids(base, static_cast<int>(parse_integer(copies.value, copies.line)),
                         pitch);
    }
    throw ParseError(builder.line, "unknown builder '" + builder.value + "'");
  }();
  t.reject_unconsumed();
  return scene;
}

/// Canonical explicit-wire serialization; parse_scene_config reproduces the
/// scene exactly (doubles are printed with 17 significant digits).
inline std::string serialize_scene_config(const Scene& scene) {
  using namespace config_detail;
  std::string out = "# nanotrap scene\n";
  out += "species.g_f = ";
  format_double(out, scene.species().g_f);
  out += "\nspecies.m_f = " + std::to_string(scene.species().m_f);
  out += "\nconstants.mu0 = ";
  format_double(out, scene.constants().mu0);
  out += "\nconstants.mu_b = ";
  format_double(out, scene.constants().mu_b);
  out += "\nconstants.hbar = ";
  format_double(out, scene.constants().hbar);
  out += "\nstandoff = ";
  format_double(out, scene.standoff());
  out += "\nrf_omega = ";
  format_double(out, scene.omega_rf());
  out += "\nbuilder = wires\n";
  int n = 0;
  for (const Wire& w : scene.wires()) {
    const std::string prefix = "wire." + std::to_string(++n) + ".";
    if (w.kind == Wire::Kind::Line) {
      out += prefix + "kind = line\n" + prefix + "point = ";
      format_vec3(out, w.point);
      out += "\n" + prefix + "direction = ";
      format_vec3(out, w.direction);
    } else {
      out += prefix + "kind = segment\n" + prefix + "a = ";
      format_vec3(out, w.a());
      out += "\n" + prefix + "b = ";
      format_vec3(out, w.b());
    }
    out += "\n" + prefix + "radius = ";
    format_double(out, w.radius);
    out += "\n" + prefix + "i_dc = ";
    format_double(out, w.i_dc);
    out += "\n" + prefix + "i_rf = ";
    format_double(out, w.i_rf);
    out += "\n";
  }
  return out;
}

/// A point "x, y, z" with optional length suffixes.
inline Vec3 parse_point_string(std::string_view text) {
  return config_detail::parse_point(text, 0);
}

/// A single current with an optional A-suffix.
inline double parse_current_string(std::string_view text) {
  return config_detail::parse_quantity(text, config_detail::Dimension::Current, 0);
}

/// `ox,oy,oz:sx,sy,sz:nx,ny,nz` with optional length suffixes on the origin
/// and spacing components.
inline GridSpec parse_grid_spec_string(std::string_view text) {
  using namespace config_detail;
  const std::string s(text);
  const std::size_t c1 = s.find(':');
  const std::size_t c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ConfigError("grid spec must be 'ox,oy,oz:sx,sy,sz:nx,ny,nz'");
  GridSpec spec;
  spec.origin = parse_point(s.substr(0, c1), 0);
  spec.spacing = parse_point(s.substr(c1 + 1, c2 - c1 - 1), 0);
  const auto counts = parse_quantity_list(s.substr(c2 + 1), Dimension::None, 0);
  if (counts.size() != 3) throw ConfigError("grid spec needs 3 counts");
  for (int a = 0; a < 3; ++a) {
    if (counts[a] != static_cast<int>(counts[a]))
      throw ConfigError("grid counts must be integers");
    spec.counts[a] = static_cast<int>(counts[a]);
  }
  spec.validate();
  return spec;
}

}  // namespace nanotrap
