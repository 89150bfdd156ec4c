#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nanotrap/errors.hpp"
#include "nanotrap/vec3.hpp"

namespace nanotrap {

/// Physical constants in SI units. Defaults are the CODATA values used
/// throughout; all fields must stay strictly positive.
struct PhysicalConstants {
  double mu0 = 4.0 * std::numbers::pi * 1e-7;  // vacuum permeability, T*m/A
  double mu_b = 9.2740e-24;                    // Bohr magneton, J/T
  double hbar = 1.0546e-34;                    // reduced Planck constant, J*s

  constexpr bool operator==(const PhysicalConstants&) const = default;

  void validate() const {
    if (!(mu0 > 0.0) || !(mu_b > 0.0) || !(hbar > 0.0))
      throw ConfigError("physical constants must be strictly positive");
  }
};

/// Hyperfine state of the trapped atom. m_f * g_f > 0 means weak-field
/// seeker in the DC regime. Default is the F=2, m_F=2 ground state of 87Rb.
struct AtomSpecies {
  double g_f = 0.5;  // Lande g-factor, dimensionless, nonzero
  int m_f = 2;       // magnetic quantum number

  constexpr bool operator==(const AtomSpecies&) const = default;

  void validate() const {
    if (g_f == 0.0) throw ConfigError("g_f must be nonzero");
  }
};

/// Carbon nanotube radius used as the default wire radius, 3.52 angstrom.
inline constexpr double kNanotubeRadius = 3.52e-10;

/// A straight current carrier: an infinite line (point on axis + unit
/// direction) or a finite segment (endpoints a, b). Carries a signed DC
/// current and a signed RF current amplitude; the RF sign encodes 0 / pi
/// phase relative to the shared drive.
struct Wire {
  enum class Kind { Line, Segment };

  Kind kind = Kind::Line;
  Vec3 point;      // Line: any point on the axis; Segment: endpoint a
  Vec3 direction;  // Line: unit direction; Segment: endpoint b
  double radius = 0.0;  // physical tube radius, m (exclusion only, not a field parameter)
  double i_dc = 0.0;    // A, signed along direction
  double i_rf = 0.0;    // A, signed amplitude

  static Wire line(const Vec3& point, const Vec3& direction, double i_dc, double i_rf,
                   double radius = kNanotubeRadius) {
    const double n = norm(direction);
    if (!(n > 0.0)) throw InvalidGeometryError("wire direction must be nonzero");
    Wire w;
    w.kind = Kind::Line;
    w.point = point;
    w.direction = std::abs(n - 1.0) <= 1e-12 ? direction : direction / n;
    w.radius = radius;
    w.i_dc = i_dc;
    w.i_rf = i_rf;
    w.check();
    return w;
  }

  static Wire segment(const Vec3& a, const Vec3& b, double i_dc, double i_rf,
                      double radius = kNanotubeRadius) {
    if (a == b) throw InvalidGeometryError("segment endpoints must be distinct");
    Wire w;
    w.kind = Kind::Segment;
    w.point = a;
    w.direction = b;
    w.radius = radius;
    w.i_dc = i_dc;
    w.i_rf = i_rf;
    w.check();
    return w;
  }

  Vec3 a() const { return point; }
  Vec3 b() const { return direction; }

  /// Unit tangent along the current direction.
  Vec3 tangent() const {
    return kind == Kind::Line ? direction : normalized(direction - point);
  }

  /// Distance from p to the axis (Line) or to the closed segment (Segment).
  double axis_distance(const Vec3& p) const {
    if (kind == Kind::Line) {
      const Vec3 r = p - point;
      return norm(r - dot(r, direction) * direction);
    }
    const Vec3 ab = direction - point;
    const double t = dot(p - point, ab) / norm_sq(ab);
    const double tc = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return norm(p - (point + tc * ab));
  }

  constexpr bool operator==(const Wire&) const = default;

  void check() const {
    if (!(radius >= 0.0)) throw InvalidGeometryError("wire radius must be >= 0");
    for (const Vec3& v : {point, direction})
      if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
        throw InvalidGeometryError("wire coordinates must be finite");
    if (kind == Kind::Line && std::abs(norm(direction) - 1.0) > 1e-12)
      throw InvalidGeometryError("line direction must have unit norm");
    if (kind == Kind::Segment && point == direction)
      throw InvalidGeometryError("segment endpoints must be distinct");
  }
};

/// Immutable wire collection plus drive frequency, atom species, constants
/// and the near-surface exclusion distance. Wire order is fixed at
/// construction and defines the floating-point summation order, so every
/// evaluation over the same Scene is bit-reproducible.
class Scene {
 public:
  Scene(std::vector<Wire> wires, double omega_rf, AtomSpecies species = {},
        PhysicalConstants constants = {}, double standoff = kDefaultStandoff)
      : wires_(std::move(wires)),
        omega_rf_(omega_rf),
        species_(species),
        constants_(constants),
        standoff_(standoff) {
    if (!(omega_rf_ >= 0.0)) throw ConfigError("omega_rf must be >= 0");
    if (!(standoff_ >= 0.0)) throw ConfigError("standoff must be >= 0");
    species_.validate();
    constants_.validate();
    for (const Wire& w : wires_) w.check();
  }

  std::span<const Wire> wires() const { return wires_; }
  double omega_rf() const { return omega_rf_; }
  const AtomSpecies& species() const { return species_; }
  const PhysicalConstants& constants() const { return constants_; }
  double standoff() const { return standoff_; }

  /// New scene with one current channel of one wire replaced.
  Scene with_current(std::size_t wire_index, bool rf_channel, double value) const {
    std::vector<Wire> ws(wires_.begin(), wires_.end());
    if (wire_index >= ws.size()) throw ConfigError("wire index out of range");
    (rf_channel ? ws[wire_index].i_rf : ws[wire_index].i_dc) = value;
    return Scene(std::move(ws), omega_rf_, species_, constants_, standoff_);
  }

  bool operator==(const Scene&) const = default;

  static constexpr double kDefaultStandoff = 100e-9;

 private:
  std::vector<Wire> wires_;
  double omega_rf_;
  AtomSpecies species_;
  PhysicalConstants constants_;
  double standoff_;
};

/// Builds the elementary four-tube cell: two wires along +z in the layer
/// x = -h/2 (at y = -d/2, +d/2), two wires along -y in the layer x = +h/2
/// (at z = -d/2, +d/2). Currents i_dc[0..3] / i_rf[0..3] are bound to the
/// wires in that order. The opposite winding of the two layers makes each
/// cell a 3D quadrupole: with the alternating-sign current pattern the
/// field vanishes at the cell center (the origin).
inline Scene build_four_tube_cell(double d, double h, const std::array<double, 4>& i_dc,
                                  const std::array<double, 4>& i_rf, double omega_rf,
                                  AtomSpecies species = {}, PhysicalConstants constants = {},
                                  double standoff = Scene::kDefaultStandoff) {
  if (!(d > 0.0) || !(h > 0.0))
    throw InvalidGeometryError("four_tube_cell: spacings d and h must be positive");
  std::vector<Wire> ws;
  ws.reserve(4);
  ws.push_back(Wire::line({-h / 2, -d / 2, 0.0}, {0.0, 0.0, 1.0}, i_dc[0], i_rf[0]));
  ws.push_back(Wire::line({-h / 2, +d / 2, 0.0}, {0.0, 0.0, 1.0}, i_dc[1], i_rf[1]));
  ws.push_back(Wire::line({+h / 2, 0.0, -d / 2}, {0.0, -1.0, 0.0}, i_dc[2], i_rf[2]));
  ws.push_back(Wire::line({+h / 2, 0.0, +d / 2}, {0.0, -1.0, 0.0}, i_dc[3], i_rf[3]));
  return Scene(std::move(ws), omega_rf, species, constants, standoff);
}

/// Builds a crossed bilayer grid: wires along +z at the given y positions
/// (layer x = -h/2) followed by wires along -y at the given z positions
/// (layer x = +h/2). Position lists must be strictly increasing and each
/// current list must match its position list in length.
inline Scene build_crossed_grid(const std::vector<double>& y_positions,
                                const std::vector<double>& z_positions, double h,
                                const std::vector<double>& i_dc_z,
                                const std::vector<double>& i_dc_y,
                                const std::vector<double>& i_rf_z,
                                const std::vector<double>& i_rf_y, double omega_rf,
                                AtomSpecies species = {}, PhysicalConstants constants = {},
                                double standoff = Scene::kDefaultStandoff) {
  if (!(h > 0.0)) throw InvalidGeometryError("crossed_grid: layer gap h must be positive");
  if (y_positions.empty() || z_positions.empty())
    throw ConfigError("crossed_grid: position lists must be non-empty");
  auto check_increasing = [](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1]))
        throw InvalidGeometryError(std::string("crossed_grid: ") + name +
                                   " positions must be strictly increasing");
  };
  check_increasing(y_positions, "y");
  check_increasing(z_positions, "z");
  if (i_dc_z.size() != y_positions.size() || i_rf_z.size() != y_positions.size() ||
      i_dc_y.size() != z_positions.size() || i_rf_y.size() != z_positions.size())
    throw ConfigError("crossed_grid: current list lengths must match position lists");
  std::vector<Wire> ws;
  ws.reserve(y_positions.size() + z_positions.size());
  for (std::size_t i = 0; i < y_positions.size(); ++i)
    ws.push_back(
        Wire::line({-h / 2, y_positions[i], 0.0}, {0.0, 0.0, 1.0}, i_dc_z[i], i_rf_z[i]));
  for (std::size_t i = 0; i < z_positions.size(); ++i)
    ws.push_back(
        Wire::line({+h / 2, 0.0, z_positions[i]}, {0.0, -1.0, 0.0}, i_dc_y[i], i_rf_y[i]));
  return Scene(std::move(ws), omega_rf, species, constants, standoff);
}

/// Replicates the scene's wire set `copies` times along +x, `pitch` apart,
/// with identical currents. copies = 1 returns the scene unchanged.
inline Scene stack_grids(const Scene& scene, int copies, double pitch) {
  if (copies < 1) throw ConfigError("stack_grids: copies must be >= 1");
  if (copies > 1 && !(pitch > 0.0))
    throw ConfigError("stack_grids: pitch must be positive (wires would coincide)");
  if (copies == 1) return scene;
  std::vector<Wire> ws;
  ws.reserve(scene.wires().size() * static_cast<std::size_t>(copies));
  for (int k = 0; k < copies; ++k) {
    const Vec3 shift{pitch * k, 0.0, 0.0};
    for (const Wire& w : scene.wires()) {
      Wire c = w;
      c.point = w.point + shift;
      if (w.kind == Wire::Kind::Segment) c.direction = w.direction + shift;
      ws.push_back(c);
    }
  }
  return Scene(std::move(ws), scene.omega_rf(), scene.species(), scene.constants(),
               scene.standoff());
}

/// Midpoints of the common perpendicular between every non-parallel pair of
/// infinite-line wires, in pair order (i < j). For the crossed builders these
/// are the inter-layer crossing points used as current-tuning targets.
inline std::vector<Vec3> crossing_midpoints(const Scene& scene) {
  std::vector<Vec3> out;
  const auto wires = scene.wires();
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (wires[i].kind != Wire::Kind::Line) continue;
    for (std::size_t j = i + 1; j < wires.size(); ++j) {
      if (wires[j].kind != Wire::Kind::Line) continue;
      const Vec3 u = wires[i].direction;
      const Vec3 v = wires[j].direction;
      const Vec3 w = wires[j].point - wires[i].point;
      const double uv = dot(u, v);
      const double denom = 1.0 - uv * uv;
      if (denom <= 1e-12) continue;  // parallel
      const double s = (dot(w, u) - uv * dot(w, v)) / denom;
      const double t = (uv * dot(w, u) - dot(w, v)) / denom;
      const Vec3 pi = wires[i].point + s * u;
      const Vec3 pj = wires[j].point + t * v;
      out.push_back(0.5 * (pi + pj));
    }
  }
  return out;
}

}  // namespace nanotrap
