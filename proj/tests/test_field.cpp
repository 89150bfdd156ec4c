#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nanotrap/field.hpp"
#include "nanotrap/scene.hpp"

using namespace nanotrap;

namespace {

constexpr double nm = 1e-9;
constexpr double uA = 1e-6;

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (static_cast<double>(rng() >> 11) * 0x1.0p-53) * (hi - lo);
}

Scene one_wire_scene(double i_dc, double i_rf) {
  return Scene({Wire::line({0, 0, 0}, {0, 0, 1}, i_dc, i_rf)}, 0.0);
}

// Rotation matrix from a unit quaternion (w, x, y, z).
struct Rotation {
  double m[3][3];
  Vec3 operator()(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
};

Rotation random_rotation(std::mt19937_64& rng) {
  double q[4];
  double n2 = 0.0;
  for (double& c : q) {
    c = uniform(rng, -1.0, 1.0);
    n2 += c * c;
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (double& c : q) c *= inv;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return Rotation{{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
                   {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
                   {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

}  // namespace

TEST_CASE("infinite wire: closed-form magnitude and handedness") {
  const Wire w = Wire::line({0, 0, 0}, {0, 0, 1}, 0, 0);
  const PhysicalConstants c;
  const double current = 15 * uA, rho = 150 * nm;
  const Vec3 b = field_of_infinite_wire(w, {rho, 0, 0}, current);
  const double expected = c.mu0 * current / (2.0 * std::numbers::pi * rho);
  CHECK(rel_diff(norm(b), expected) < 1e-12);
  CHECK(rel_diff(norm(b), 2.0e-5) < 1e-12);
  CHECK(b.x == 0.0);
  CHECK(b.z == 0.0);
  CHECK(b.y > 0.0);  // right-handed about +z
}

TEST_CASE("infinite wire: zero current, on-axis singularity") {
  const Wire w = Wire::line({1, 2, 3}, {0, 1, 0}, 0, 0);
  CHECK(field_of_infinite_wire(w, {5, 0, 7}, 0.0) == Vec3{0, 0, 0});
  CHECK_THROWS_AS(field_of_infinite_wire(w, {1, -4, 3}, 1.0), SingularityError);
}

TEST_CASE("infinite wire matches mu0 I/(2 pi rho) over random draws") {
  std::mt19937_64 rng(42);
  const PhysicalConstants c;
  for (int trial = 0; trial < 1000; ++trial) {
    const double current = uniform(rng, -20 * uA, 20 * uA);
    const double rho = uniform(rng, 50 * nm, 5000 * nm);
    const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double along = uniform(rng, -1e-6, 1e-6);
    const Vec3 origin{uniform(rng, -1e-7, 1e-7), uniform(rng, -1e-7, 1e-7),
                      uniform(rng, -1e-7, 1e-7)};
    const Wire w = Wire::line(origin, {0, 0, 1}, 0, 0);
    const Vec3 radial{std::cos(phi), std::sin(phi), 0.0};
    const Vec3 p = origin + rho * radial + Vec3{0, 0, along};
    const Vec3 b = field_of_infinite_wire(w, p, current);
    CHECK(rel_diff(norm(b), c.mu0 * std::abs(current) / (2.0 * std::numbers::pi * rho)) <
          1e-12);
    CHECK(std::abs(dot(b, radial)) <= 1e-12 * norm(b));  // azimuthal
    CHECK(b.z == 0.0);
    CHECK(dot(b, cross(Vec3{0, 0, 1}, radial)) * current > 0.0);
  }
}

TEST_CASE("segment: symmetric 45-degree geometry") {
  // half-length rho at perpendicular distance rho: |B| = (sqrt2/2) mu0 I/(2 pi rho)
  const PhysicalConstants c;
  const double rho = 120 * nm, current = 7 * uA;
  const Vec3 b = field_of_segment({0, 0, -rho}, {0, 0, rho}, current, {rho, 0, 0});
  const double expected =
      (std::sqrt(2.0) / 2.0) * c.mu0 * current / (2.0 * std::numbers::pi * rho);
  CHECK(rel_diff(norm(b), expected) < 1e-12);
  CHECK(b.x == 0.0);
  CHECK(b.z == 0.0);
}

TEST_CASE("segment converges to the infinite wire") {
  const PhysicalConstants c;
  const double rho = 100 * nm, current = 5 * uA;
  const double half = 1e4 * rho / 2.0;
  const Vec3 seg = field_of_segment({0, 0, -half}, {0, 0, half}, current, {rho, 0, 0});
  const double infinite = c.mu0 * current / (2.0 * std::numbers::pi * rho);
  CHECK(rel_diff(norm(seg), infinite) < 1e-6);
}

TEST_CASE("segment edge cases") {
  CHECK(field_of_segment({0, 0, -1}, {0, 0, 1}, 0.0, {1, 0, 0}) == Vec3{0, 0, 0});
  CHECK_THROWS_AS(field_of_segment({1, 1, 1}, {1, 1, 1}, 1.0, {0, 0, 0}),
                  InvalidGeometryError);
  CHECK_THROWS_AS(field_of_segment({0, 0, -1}, {0, 0, 1}, 1.0, {0, 0, 0.25}),
                  SingularityError);
  // on the carrier line but beyond a cap: field vanishes identically
  CHECK(field_of_segment({0, 0, -1}, {0, 0, 1}, 3.0, {0, 0, 2.5}) == Vec3{0, 0, 0});
}

TEST_CASE("dc_field of a one-wire scene equals the single-wire field") {
  const Scene s = one_wire_scene(11 * uA, 0.0);
  const Vec3 p{170 * nm, -90 * nm, 30 * nm};
  CHECK(dc_field(s, p) == field_of_infinite_wire(s.wires()[0], p, 11 * uA));
}

TEST_CASE("negating every current negates the field exactly") {
  const Scene s = build_four_tube_cell(355.6 * nm, 256.8 * nm,
                                       {-15 * uA, 15 * uA, 15 * uA, -15 * uA},
                                       {-4 * uA, 4 * uA, 4 * uA, -4 * uA}, 0.0);
  std::vector<Wire> negated(s.wires().begin(), s.wires().end());
  for (Wire& w : negated) {
    w.i_dc = -w.i_dc;
    w.i_rf = -w.i_rf;
  }
  const Scene sneg(std::move(negated), 0.0, s.species(), s.constants(), s.standoff());
  const Vec3 p{40 * nm, 60 * nm, -110 * nm};
  CHECK(dc_field(sneg, p) == -dc_field(s, p));
  CHECK(rf_field_amplitude(sneg, p) == -rf_field_amplitude(s, p));
}

TEST_CASE("two antiparallel z-wires: midpoint field adds") {
  const PhysicalConstants c;
  const double d = 300 * nm, current = 9 * uA;
  const Scene s(
      {Wire::line({0, -d / 2, 0}, {0, 0, 1}, -current, 0),
       Wire::line({0, +d / 2, 0}, {0, 0, 1}, +current, 0)},
      0.0);
  const Vec3 b = dc_field(s, {0, 0, 0});
  const double expected = 2.0 * c.mu0 * current / (2.0 * std::numbers::pi * (d / 2));
  CHECK(rel_diff(b.x, expected) < 1e-12);
  CHECK(std::abs(b.y) <= 1e-30);
  CHECK(std::abs(b.z) <= 1e-30);
}

TEST_CASE("rf amplitude: zero currents, closed form, sign flip") {
  CHECK(rf_field_amplitude(one_wire_scene(3 * uA, 0.0), {50 * nm, 0, 0}) == Vec3{0, 0, 0});

  const Scene s = one_wire_scene(0.0, 4 * uA);
  const Vec3 b = rf_field_amplitude(s, {100 * nm, 0, 0});
  CHECK(rel_diff(norm(b), 8.0e-6) < 1e-12);

  const Scene flipped = one_wire_scene(0.0, -4 * uA);
  CHECK(rf_field_amplitude(flipped, {100 * nm, 0, 0}) == -b);
}

TEST_CASE("linearity in the current") {
  const Wire w = Wire::line({0, 0, 0}, {0, 0, 1}, 0, 0);
  const Vec3 p{130 * nm, 77 * nm, -10 * nm};
  const Vec3 base = field_of_infinite_wire(w, p, 3 * uA);
  for (double alpha : {2.0, 0.5, -4.0}) {  // power-of-two scalings commute exactly
    const Vec3 scaled = field_of_infinite_wire(w, p, alpha * (3 * uA));
    CHECK(scaled == alpha * base);
  }
  const Vec3 scaled = field_of_infinite_wire(w, p, 1.7 * (3 * uA));
  CHECK(rel_diff(norm(scaled), 1.7 * norm(base)) < 1e-14);
}

TEST_CASE("superposition is the in-order sum, bit for bit") {
  const Wire w1 = Wire::line({0, -100 * nm, 0}, {0, 0, 1}, 5 * uA, 0);
  const Wire w2 = Wire::line({0, +130 * nm, 0}, {0, 1, 0}, -8 * uA, 0);
  const Scene both({w1, w2}, 0.0);
  const Scene only1({w1}, 0.0);
  const Scene only2({w2}, 0.0);
  const Vec3 p{60 * nm, 10 * nm, 25 * nm};
  CHECK(dc_field(both, p) == dc_field(only1, p) + dc_field(only2, p));
}

TEST_CASE("rigid-transform equivariance") {
  std::mt19937_64 rng(7);
  const Scene s = build_four_tube_cell(355.6 * nm, 256.8 * nm,
                                       {-15 * uA, 15 * uA, 15 * uA, -15 * uA},
                                       {-4 * uA, 4 * uA, 4 * uA, -4 * uA}, 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Rotation rot = random_rotation(rng);
    const Vec3 shift{uniform(rng, -1e-6, 1e-6), uniform(rng, -1e-6, 1e-6),
                     uniform(rng, -1e-6, 1e-6)};
    std::vector<Wire> moved;
    for (const Wire& w : s.wires())
      moved.push_back(Wire::line(rot(w.point) + shift, rot(w.direction), w.i_dc, w.i_rf));
    const Scene transformed(std::move(moved), s.omega_rf(), s.species(), s.constants(),
                            s.standoff());
    const Vec3 p{uniform(rng, -300 * nm, 300 * nm), uniform(rng, -300 * nm, 300 * nm),
                 uniform(rng, -300 * nm, 300 * nm)};
    const Vec3 expected = rot(dc_field(s, p));
    const Vec3 got = dc_field(transformed, rot(p) + shift);
    CHECK(norm(got - expected) <= 1e-12 * norm(expected));
  }
}

TEST_CASE("sampled field is divergence-free") {
  const Scene s = build_four_tube_cell(355.6 * nm, 256.8 * nm,
                                       {-15 * uA, 15 * uA, 15 * uA, -15 * uA},
                                       {-4 * uA, 4 * uA, 4 * uA, -4 * uA}, 0.0);
  // 1 nm central differences; points a few um out so the O(h^2) stencil term
  // sits well below the 1e-6 bound (it is ~3e-6 of the Jacobian norm at
  // 100-300 nm purely from discretization of the exact field).
  const double h = 1 * nm;
  for (const Vec3& p : {Vec3{5e-6, 3.1e-6, 2.2e-6}, Vec3{-6e-6, 4.5e-6, -3e-6},
                        Vec3{7.5e-6, -5.2e-6, 4.4e-6}}) {
    double jac[3][3];
    for (int a = 0; a < 3; ++a) {
      Vec3 e{0, 0, 0};
      (a == 0 ? e.x : a == 1 ? e.y : e.z) = h;
      const Vec3 plus = dc_field(s, p + e);
      const Vec3 minus = dc_field(s, p - e);
      jac[0][a] = (plus.x - minus.x) / (2 * h);
      jac[1][a] = (plus.y - minus.y) / (2 * h);
      jac[2][a] = (plus.z - minus.z) / (2 * h);
    }
    const double div = jac[0][0] + jac[1][1] + jac[2][2];
    double frob = 0.0;
    for (auto& row : jac)
      for (double v : row) frob += v * v;
    frob = std::sqrt(frob);
    CHECK(std::abs(div) < 1e-6 * frob);
  }
}
