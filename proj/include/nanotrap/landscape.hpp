#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <thread>
#include <utility>
#include <vector>

#include "nanotrap/errors.hpp"
#include "nanotrap/potential.hpp"
#include "nanotrap/scene.hpp"

namespace nanotrap {

/// Axis-aligned sampling lattice: position(i,j,k) = origin + spacing * index.
struct GridSpec {
  Vec3 origin;
  Vec3 spacing;                       // per-axis step, > 0
  std::array<int, 3> counts{2, 2, 2};  // >= 2 per axis

  void validate() const {
    for (int a = 0; a < 3; ++a) {
      if (counts[a] < 2) throw ConfigError("grid counts must be >= 2 per axis");
      if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
        throw ConfigError("grid spacing must be positive and finite");
      if (!std::isfinite(origin[a])) throw ConfigError("grid origin must be finite");
    }
  }

  std::size_t size() const {
    return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
  }

  /// Flat index, x-fastest.
  std::size_t flat(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(counts[0]) * (static_cast<std::size_t>(j) +
                                                  static_cast<std::size_t>(counts[1]) * k);
  }

  std::array<int, 3> unflatten(std::size_t f) const {
    const int i = static_cast<int>(f % counts[0]);
    const int j = static_cast<int>((f / counts[0]) % counts[1]);
    const int k = static_cast<int>(f / (static_cast<std::size_t>(counts[0]) * counts[1]));
    return {i, j, k};
  }

  Vec3 position(int i, int j, int k) const {
    return {origin.x + spacing.x * i, origin.y + spacing.y * j, origin.z + spacing.z * k};
  }

  bool operator==(const GridSpec&) const = default;
};

/// Sampled potential values (x-fastest) with an exclusion mask
/// (true = excluded/invalid). Unmasked values are finite.
struct PotentialGrid {
  GridSpec spec;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  PotentialMode mode = PotentialMode::Dc;

  void validate() const {
    spec.validate();
    if (values.size() != spec.size() || mask.size() != spec.size())
      throw ConfigError("grid array lengths must equal the product of counts");
    for (std::size_t f = 0; f < values.size(); ++f)
      if (!mask[f] && !std::isfinite(values[f]))
        throw ConfigError("unmasked grid values must be finite");
  }
};

enum class ExtremumKind { Min, Max };

/// A located landscape feature. isolated_3d / shell_margin are filled by
/// isolation_check (find_local_extrema leaves them false / 0).
struct Extremum {
  ExtremumKind kind = ExtremumKind::Min;
  std::array<int, 3> index{0, 0, 0};
  Vec3 position;
  double value = 0.0;
  bool isolated_3d = false;
  double shell_margin = 0.0;
};

/// Samples the selected potential over the lattice. Excluded cells are
/// masked and store 0. Work is split over `n_threads` contiguous chunks
/// (0 = hardware concurrency); per-cell evaluation is pure, so the result
/// is bit-identical to a sequential run.
inline PotentialGrid sample_grid(const Scene& scene, const GridSpec& spec, PotentialMode mode,
                                 unsigned n_threads = 0) {
  spec.validate();
  if (mode == PotentialMode::Dressed && !(scene.omega_rf() > 0.0))
    throw ModeError("dressed sampling requires omega_rf > 0");
  PotentialGrid grid;
  grid.spec = spec;
  grid.mode = mode;
  const std::size_t n = spec.size();
  grid.values.assign(n, 0.0);
  grid.mask.assign(n, 0);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      const auto idx = spec.unflatten(f);
      const Vec3 p = spec.position(idx[0], idx[1], idx[2]);
      if (is_excluded(scene, p)) {
        grid.mask[f] = 1;
        continue;
      }
      grid.values[f] = potential(scene, p, mode);
    }
  };

  unsigned workers = n_threads != 0 ? n_threads : std::thread::hardware_concurrency();
  if (workers <= 1 || n < 1024) {
    work(0, n);
    return grid;
  }
  workers = std::min<unsigned>(workers, 64);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t begin = std::min(n, t * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return grid;
}

/// Strict 26-neighbour extrema over unmasked interior cells. A cell with any
/// masked or out-of-grid neighbour is never reported (insufficient evidence).
/// Result order: MAX entries by descending value, then MIN entries by
/// ascending value; ties by index.
inline std::vector<Extremum> find_local_extrema(const PotentialGrid& grid) {
  grid.validate();
  const auto& s = grid.spec;
  std::vector<Extremum> out;
  for (int k = 1; k < s.counts[2] - 1; ++k)
    for (int j = 1; j < s.counts[1] - 1; ++j)
      for (int i = 1; i < s.counts[0] - 1; ++i) {
        const std::size_t f = s.flat(i, j, k);
        if (grid.mask[f]) continue;
        const double v = grid.values[f];
        bool is_max = true, is_min = true;
        for (int dk = -1; dk <= 1 && (is_max || is_min); ++dk)
          for (int dj = -1; dj <= 1 && (is_max || is_min); ++dj)
            for (int di = -1; di <= 1; ++di) {
              if (di == 0 && dj == 0 && dk == 0) continue;
              const std::size_t g = s.flat(i + di, j + dj, k + dk);
              if (grid.mask[g]) {
                is_max = is_min = false;
                break;
              }
              const double w = grid.values[g];
              if (!(v > w)) is_max = false;
              if (!(v < w)) is_min = false;
              if (!is_max && !is_min) break;
            }
        if (is_max || is_min) {
          Extremum e;
          e.kind = is_max ? ExtremumKind::Max : ExtremumKind::Min;
          e.index = {i, j, k};
          e.position = s.position(i, j, k);
          e.value = v;
          out.push_back(e);
        }
      }
  std::sort(out.begin(), out.end(), [](const Extremum& a, const Extremum& b) {
    if (a.kind != b.kind) return a.kind == ExtremumKind::Max;
    if (a.value != b.value) return a.kind == ExtremumKind::Max ? a.value > b.value
                                                               : a.value < b.value;
    return a.index < b.index;
  });
  return out;
}

/// Shell test for 3D isolation: every unmasked cell on the cubic shell at
/// Chebyshev distance `shell_radius` must lie strictly below (MAX) / above
/// (MIN) the extremum value, and the shell must not extend past the grid.
/// Returns {isolated, min |value - shell value|}; failures report margin 0.
inline std::pair<bool, double> isolation_check(const PotentialGrid& grid, const Extremum& e,
                                               int shell_radius) {
  if (shell_radius < 1) throw ConfigError("shell_radius must be >= 1");
  const auto& s = grid.spec;
  const auto [i0, j0, k0] = e.index;
  double margin = std::numeric_limits<double>::infinity();
  bool compared = false;
  for (int dk = -shell_radius; dk <= shell_radius; ++dk)
    for (int dj = -shell_radius; dj <= shell_radius; ++dj)
      for (int di = -shell_radius; di <= shell_radius; ++di) {
        if (std::max({std::abs(di), std::abs(dj), std::abs(dk)}) != shell_radius) continue;
        const int i = i0 + di, j = j0 + dj, k = k0 + dk;
        if (i < 0 || j < 0 || k < 0 || i >= s.counts[0] || j >= s.counts[1] ||
            k >= s.counts[2])
          return {false, 0.0};  // shell extends past the grid
        const std::size_t f = s.flat(i, j, k);
        if (grid.mask[f]) continue;
        const double w = grid.values[f];
        if (e.kind == ExtremumKind::Max ? !(w < e.value) : !(w > e.value)) return {false, 0.0};
        margin = std::min(margin, std::abs(e.value - w));
        compared = true;
      }
  if (!compared) return {false, 0.0};  // fully masked shell: no evidence
  return {true, margin};
}

/// Fills isolated_3d / shell_margin on every entry.
inline void classify_isolation(const PotentialGrid& grid, std::vector<Extremum>& extrema,
                               int shell_radius) {
  for (Extremum& e : extrema) {
    const auto [iso, margin] = isolation_check(grid, e, shell_radius);
    e.isolated_3d = iso;
    e.shell_margin = margin;
  }
}

/// Minimax path value between two unmasked cells over the 26-connected
/// unmasked grid graph: for MIN-type wells (default) the smallest possible
/// maximum value along a path from a to b (a widest-path Dijkstra variant,
/// ties broken by flat cell index); for MAX-type peaks the dual maximin.
/// The path includes both endpoints; a == b returns the value at a.
inline double barrier_between(const PotentialGrid& grid, const std::array<int, 3>& a,
                              const std::array<int, 3>& b,
                              ExtremumKind kind = ExtremumKind::Min) {
  const auto& s = grid.spec;
  for (const auto& idx : {a, b}) {
    if (idx[0] < 0 || idx[1] < 0 || idx[2] < 0 || idx[0] >= s.counts[0] ||
        idx[1] >= s.counts[1] || idx[2] >= s.counts[2])
      throw ConfigError("barrier endpoint outside the grid");
    if (grid.mask[s.flat(idx[0], idx[1], idx[2])])
      throw ConfigError("barrier endpoints must be unmasked");
  }
  // maximin == -minimax on the negated landscape
  const double sign = kind == ExtremumKind::Min ? 1.0 : -1.0;
  const std::size_t fa = s.flat(a[0], a[1], a[2]);
  const std::size_t fb = s.flat(b[0], b[1], b[2]);
  if (fa == fb) return grid.values[fa];

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(s.size(), inf);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  best[fa] = sign * grid.values[fa];
  queue.emplace(best[fa], fa);
  while (!queue.empty()) {
    const auto [cost, f] = queue.top();
    queue.pop();
    if (cost > best[f]) continue;
    if (f == fb) return sign * cost;
    const auto [i, j, k] = s.unflatten(f);
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0 && dk == 0) continue;
          const int ni = i + di, nj = j + dj, nk = k + dk;
          if (ni < 0 || nj < 0 || nk < 0 || ni >= s.counts[0] || nj >= s.counts[1] ||
              nk >= s.counts[2])
            continue;
          const std::size_t g = s.flat(ni, nj, nk);
          if (grid.mask[g]) continue;
          const double c = std::max(cost, sign * grid.values[g]);
          if (c < best[g]) {
            best[g] = c;
            queue.emplace(c, g);
          }
        }
  }
  throw NoPathError("barrier endpoints lie in disconnected unmasked regions");
}

}  // namespace nanotrap
