#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "nanotrap/errors.hpp"
#include "nanotrap/landscape.hpp"

namespace nanotrap {

/// Default upper clamp for rendering: dressed potentials are cut off at
/// this energy so the steep near-wire growth does not swamp the color scale.
inline constexpr double kDefaultRenderClamp = 7e-28;

namespace render_detail {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kDarkBlue{0, 0, 139};
inline constexpr Rgb kGreen{0, 255, 0};
inline constexpr Rgb kRed{255, 0, 0};
inline constexpr Rgb kMaskDarkRed{139, 0, 0};

inline Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  Rgb out;
  for (int c = 0; c < 3; ++c)
    out[c] = static_cast<std::uint8_t>(std::lround(a[c] + t * (b[c] - a[c])));
  return out;
}

// three-stop linear map: dark blue -> green -> red
inline Rgb colormap(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t <= 0.5 ? lerp(kDarkBlue, kGreen, 2.0 * t) : lerp(kGreen, kRed, 2.0 * t - 1.0);
}

}  // namespace render_detail

/// Renders one axis slice as a PPM (P6) image, one pixel per cell. Unmasked
/// values are clamped to [slice minimum, clamp_max] and mapped through the
/// dark-blue -> green -> red ramp; masked cells are drawn dark red. The
/// in-plane axes follow cyclic order (x->(y,z), y->(z,x), z->(x,y)) with the
/// second axis pointing up.
inline std::string render_slice(const PotentialGrid& grid, int axis, int index,
                                double clamp_max = kDefaultRenderClamp) {
  using namespace render_detail;
  grid.validate();
  if (axis < 0 || axis > 2) throw ConfigError("render: axis must be 0, 1 or 2");
  if (index < 0 || index >= grid.spec.counts[axis])
    throw ConfigError("render: slice index out of range");
  const int ua = (axis + 1) % 3;  // image columns
  const int va = (axis + 2) % 3;  // image rows, flipped so +v is up
  const int width = grid.spec.counts[ua];
  const int height = grid.spec.counts[va];

  auto flat_at = [&](int u, int v) {
    std::array<int, 3> idx;
    idx[axis] = index;
    idx[ua] = u;
    idx[va] = v;
    return grid.spec.flat(idx[0], idx[1], idx[2]);
  };

  double lo = std::numeric_limits<double>::infinity();
  for (int v = 0; v < height; ++v)
    for (int u = 0; u < width; ++u) {
      const std::size_t f = flat_at(u, v);
      if (!grid.mask[f]) lo = std::min(lo, grid.values[f]);
    }

  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(width) * height * 3);
  for (int row = 0; row < height; ++row) {
    const int v = height - 1 - row;
    for (int u = 0; u < width; ++u) {
      const std::size_t f = flat_at(u, v);
      Rgb c;
      if (grid.mask[f]) {
        c = kMaskDarkRed;
      } else {
        const double span = clamp_max - lo;
        const double t = span > 0.0 ? (std::min(grid.values[f], clamp_max) - lo) / span : 0.0;
        c = colormap(t);
      }
      out.push_back(static_cast<char>(c[0]));
      out.push_back(static_cast<char>(c[1]));
      out.push_back(static_cast<char>(c[2]));
    }
  }
  return out;
}

}  // namespace nanotrap
