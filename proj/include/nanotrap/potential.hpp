#pragma once

#include <cmath>

#include "nanotrap/errors.hpp"
#include "nanotrap/field.hpp"
#include "nanotrap/scene.hpp"

namespace nanotrap {

/// The two trapping regimes: DC Zeeman potential, or the RF-dressed
/// adiabatic potential (requires omega_rf > 0).
enum class PotentialMode { Dc, Dressed };

inline const char* to_string(PotentialMode m) {
  return m == PotentialMode::Dc ? "dc" : "dressed";
}

/// DC Zeeman effective potential m_F g_F mu_B |B_DC(r)|, joules.
/// Sign follows sign(m_F g_F): positive for weak-field seekers.
inline double dc_potential(const Scene& scene, const Vec3& point) {
  const Vec3 b = dc_field(scene, point);
  return scene.species().m_f * scene.species().g_f * scene.constants().mu_b * norm(b);
}

/// Adiabatic dressed-level energy from the field magnitudes:
///   m_F * sqrt(delta^2 + coupling^2)
/// with detuning delta = g_F mu_B b_dc - hbar omega and Rabi coupling
/// g_F mu_B b_rf_perp / 2. Exposed separately so the formula can be driven
/// directly with known magnitudes.
inline double dressed_energy(double b_dc_mag, double b_rf_perp_mag, const AtomSpecies& species,
                             const PhysicalConstants& constants, double omega_rf) {
  if (!(omega_rf > 0.0)) throw ModeError("dressed potential requires omega_rf > 0");
  const double zeeman = species.g_f * constants.mu_b;
  const double delta = zeeman * b_dc_mag - constants.hbar * omega_rf;
  const double coupling = zeeman * b_rf_perp_mag / 2.0;
  return species.m_f * std::hypot(delta, coupling);
}

/// Component of the RF amplitude perpendicular to the local DC field
/// direction. Where the DC field vanishes the full RF magnitude is used
/// (the direction is degenerate there).
inline double rf_perpendicular_magnitude(const FieldSample& s) {
  const double b = norm(s.b_dc);
  if (b == 0.0) return norm(s.b_rf);
  const Vec3 bhat = s.b_dc / b;
  return norm(s.b_rf - dot(s.b_rf, bhat) * bhat);
}

/// RF-dressed effective potential at a point, joules.
inline double dressed_potential(const Scene& scene, const Vec3& point) {
  if (!(scene.omega_rf() > 0.0)) throw ModeError("dressed potential requires omega_rf > 0");
  const FieldSample s = sample_fields(scene, point);
  return dressed_energy(norm(s.b_dc), rf_perpendicular_magnitude(s), scene.species(),
                        scene.constants(), scene.omega_rf());
}

/// Potential in the selected mode.
inline double potential(const Scene& scene, const Vec3& point, PotentialMode mode) {
  return mode == PotentialMode::Dc ? dc_potential(scene, point)
                                   : dressed_potential(scene, point);
}

/// True iff the point is closer than scene.standoff to any wire axis.
inline bool is_excluded(const Scene& scene, const Vec3& point) {
  if (scene.standoff() <= 0.0) return false;
  for (const Wire& w : scene.wires())
    if (w.axis_distance(point) < scene.standoff()) return true;
  return false;
}

}  // namespace nanotrap
