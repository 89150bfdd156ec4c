#pragma once

#include <cmath>
#include <numbers>

#include "nanotrap/errors.hpp"
#include "nanotrap/scene.hpp"
#include "nanotrap/vec3.hpp"

namespace nanotrap {

/// DC field vector and RF amplitude vector at one point, tesla. The RF
/// vector is a signed magnetostatic amplitude; its sign pattern encodes the
/// 0/pi phases of the drive currents.
struct FieldSample {
  Vec3 b_dc;
  Vec3 b_rf;
};

namespace detail {

/// Geometry factor of an infinite line current: B = current * unit_factor.
/// Throws if the point lies on the axis.
inline Vec3 line_unit_field(const Vec3& point_on_axis, const Vec3& direction, double mu0,
                            const Vec3& p) {
  const Vec3 r = p - point_on_axis;
  const Vec3 d = r - dot(r, direction) * direction;
  const double rho2 = norm_sq(d);
  if (rho2 == 0.0) throw SingularityError("evaluation point on wire axis");
  const double k = mu0 / (2.0 * std::numbers::pi * rho2);
  return k * cross(direction, d);
}

/// Geometry factor of a finite segment a->b. Magnitude is
/// mu0/(4 pi rho) * (sin t2 - sin t1) with the angles measured from the
/// perpendicular foot; direction is azimuthal about the segment. Points on
/// the carrier line but outside the closed segment see a zero field.
inline Vec3 segment_unit_field(const Vec3& a, const Vec3& b, double mu0, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len = norm(ab);
  if (len == 0.0) throw InvalidGeometryError("segment endpoints must be distinct");
  const Vec3 u = ab / len;
  const Vec3 ra = p - a;
  const double t = dot(ra, u);
  const Vec3 d = ra - t * u;  // perpendicular from axis to p
  const double rho2 = norm_sq(d);
  if (rho2 == 0.0) {
    if (t >= 0.0 && t <= len) throw SingularityError("evaluation point on wire segment");
    return {};  // on the carrier line beyond a cap: dl x r vanishes identically
  }
  const Vec3 rb = p - b;
  const double sin1 = dot(a - p, u) / norm(ra);
  const double sin2 = dot(b - p, u) / norm(rb);
  const double k = mu0 * (sin2 - sin1) / (4.0 * std::numbers::pi * rho2);
  return k * cross(u, d);
}

inline Vec3 wire_unit_field(const Wire& w, double mu0, const Vec3& p) {
  return w.kind == Wire::Kind::Line ? line_unit_field(w.point, w.direction, mu0, p)
                                    : segment_unit_field(w.a(), w.b(), mu0, p);
}

}  // namespace detail

/// Field of a single infinite straight wire carrying `current`, tesla.
/// Magnitude mu0*I/(2 pi rho), azimuthal (right-handed about the direction).
inline Vec3 field_of_infinite_wire(const Wire& wire, const Vec3& point, double current,
                                   const PhysicalConstants& constants = {}) {
  return current * detail::line_unit_field(wire.point,
                                           wire.kind == Wire::Kind::Line
                                               ? wire.direction
                                               : wire.tangent(),
                                           constants.mu0, point);
}

/// Field of a finite straight segment from a to b carrying `current`, tesla.
inline Vec3 field_of_segment(const Vec3& a, const Vec3& b, double current, const Vec3& point,
                             const PhysicalConstants& constants = {}) {
  return current * detail::segment_unit_field(a, b, constants.mu0, point);
}

/// DC and RF field of the whole scene in one pass. Per-wire geometry factors
/// are computed once and scaled by each channel's current; wires are summed
/// in list order, so results are deterministic and independent of threading.
inline FieldSample sample_fields(const Scene& scene, const Vec3& point) {
  FieldSample s;
  const double mu0 = scene.constants().mu0;
  for (const Wire& w : scene.wires()) {
    const Vec3 unit = detail::wire_unit_field(w, mu0, point);
    s.b_dc += w.i_dc * unit;
    s.b_rf += w.i_rf * unit;
  }
  return s;
}

/// Superposed DC field of the scene, tesla.
inline Vec3 dc_field(const Scene& scene, const Vec3& point) {
  Vec3 b;
  const double mu0 = scene.constants().mu0;
  for (const Wire& w : scene.wires()) b += w.i_dc * detail::wire_unit_field(w, mu0, point);
  return b;
}

/// Superposed RF amplitude vector of the scene, tesla.
inline Vec3 rf_field_amplitude(const Scene& scene, const Vec3& point) {
  Vec3 b;
  const double mu0 = scene.constants().mu0;
  for (const Wire& w : scene.wires()) b += w.i_rf * detail::wire_unit_field(w, mu0, point);
  return b;
}

}  // namespace nanotrap
