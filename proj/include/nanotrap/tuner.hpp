#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "nanotrap/errors.hpp"
#include "nanotrap/potential.hpp"
#include "nanotrap/scene.hpp"

namespace nanotrap {

/// Sum of the selected potential over the target points, joules.
inline double objective(const Scene& scene, const std::vector<Vec3>& targets,
                        PotentialMode mode) {
  double sum = 0.0;
  for (const Vec3& t : targets) sum += potential(scene, t, mode);
  return sum;
}

enum class Channel { Dc, Rf };
enum class TuneSense { Minimize, Maximize };

struct FreeCurrent {
  std::size_t wire = 0;
  Channel channel = Channel::Dc;
};

/// Options of the bounded derivative-free simplex search. Tolerances set to
/// zero disable the corresponding stopping rule; max_evals is the total
/// budget across all restarts.
struct SimplexOptions {
  double f_tolerance = 1e-32;  // absolute objective spread, J
  double x_tolerance = 0.0;    // simplex extent in variable units
  int max_evals = 10000;
  int restarts = 3;  // additional independent starts beyond the first
  std::uint64_t seed = 0;
  double initial_step = 0.05;   // first simplex edge, fraction of bound range
  double restart_scale = 0.1;   // restart perturbation, fraction of bound range
};

struct SimplexResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int evals = 0;
  std::vector<std::pair<int, double>> trace;  // (evals, best objective so far)
};

namespace detail {

// Implementation-independent uniform double in [0, 1) for reproducibility.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Derivative-free Nelder-Mead minimization with box projection and
/// deterministic restarts from scaled perturbations of the initial point.
/// Restart starting points depend only on (seed, restart index), so the
/// search is reproducible run to run.
inline SimplexResult simplex_minimize(const std::function<double(const std::vector<double>&)>& fn,
                                      const std::vector<double>& lo,
                                      const std::vector<double>& hi,
                                      const std::vector<double>& x0,
                                      const SimplexOptions& options = {}) {
  const std::size_t n = x0.size();
  if (n == 0 || lo.size() != n || hi.size() != n)
    throw ConfigError("optimizer: bounds must match the variable count");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lo[i] < hi[i])) throw ConfigError("optimizer: infeasible bounds (lo >= hi)");
  if (options.max_evals < 1) throw ConfigError("optimizer: max_evals must be >= 1");

  auto clamp = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
  };

  SimplexResult result;
  auto evaluate = [&](const std::vector<double>& x) {
    const double f = fn(x);
    ++result.evals;
    if (f < result.value) {
      result.value = f;
      result.x = x;
      result.trace.emplace_back(result.evals, f);
    }
    return f;
  };

  struct Vertex {
    std::vector<double> x;
    double f;
  };

  for (int restart = 0; restart <= options.restarts; ++restart) {
    if (result.evals >= options.max_evals) break;
    std::vector<double> start = x0;
    if (restart > 0) {
      std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(restart));
      for (std::size_t i = 0; i < n; ++i)
        start[i] += options.restart_scale * (hi[i] - lo[i]) *
                    (2.0 * detail::unit_uniform(rng) - 1.0);
    }
    start = clamp(std::move(start));

    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back({start, evaluate(start)});
    for (std::size_t i = 0; i < n && result.evals < options.max_evals; ++i) {
      std::vector<double> v = start;
      const double step = options.initial_step * (hi[i] - lo[i]);
      v[i] = v[i] + step <= hi[i] ? v[i] + step : v[i] - step;
      v = clamp(std::move(v));
      simplex.push_back({v, evaluate(v)});
    }
    if (simplex.size() < n + 1) break;  // budget exhausted mid-setup

    while (result.evals < options.max_evals) {
      std::stable_sort(simplex.begin(), simplex.end(),
                       [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      const double spread = simplex.back().f - simplex.front().f;
      if (options.f_tolerance > 0.0 && spread <= options.f_tolerance) break;
      if (options.x_tolerance > 0.0) {
        double extent = 0.0;
        for (const Vertex& v : simplex)
          for (std::size_t i = 0; i < n; ++i)
            extent = std::max(extent, std::abs(v.x[i] - simplex.front().x[i]));
        if (extent <= options.x_tolerance) break;
      }
      bool degenerate = true;
      for (const Vertex& v : simplex)
        if (v.x != simplex.front().x) degenerate = false;
      if (degenerate) break;  // collapsed onto one point (e.g. pinned at a bound)

      std::vector<double> centroid(n, 0.0);
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
      for (std::size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);
      const std::vector<double>& worst = simplex.back().x;

      auto along = [&](double t) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (centroid[i] - worst[i]);
        return clamp(std::move(x));
      };

      const std::vector<double> xr = along(1.0);
      const double fr = evaluate(xr);
      if (fr < simplex.front().f) {
        if (result.evals >= options.max_evals) break;
        const std::vector<double> xe = along(2.0);
        const double fe = evaluate(xe);
        simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        continue;
      }
      if (fr < simplex[n - 1].f) {
        simplex.back() = {xr, fr};
        continue;
      }
      if (result.evals >= options.max_evals) break;
      const bool outside = fr < simplex.back().f;
      const std::vector<double> xc = along(outside ? 0.5 : -0.5);
      const double fc = evaluate(xc);
      if (fc < (outside ? fr : simplex.back().f)) {
        simplex.back() = {xc, fc};
        continue;
      }
      // shrink toward the best vertex
      for (std::size_t v = 1; v <= n && result.evals < options.max_evals; ++v) {
        for (std::size_t i = 0; i < n; ++i)
          simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
        simplex[v].x = clamp(std::move(simplex[v].x));
        simplex[v].f = evaluate(simplex[v].x);
      }
    }
  }
  return result;
}

/// A current-tuning task: which currents move, inside which bounds, to
/// minimize or maximize the summed potential at the target points.
struct TuneProblem {
  explicit TuneProblem(Scene s) : scene(std::move(s)) {}

  Scene scene;
  std::vector<FreeCurrent> free_currents;
  std::vector<std::pair<double, double>> bounds;  // per-variable (lo, hi), A
  std::vector<Vec3> targets;
  PotentialMode mode = PotentialMode::Dressed;
  TuneSense sense = TuneSense::Minimize;
  double tolerance = 1e-32;  // absolute objective spread, J
  int max_evals = 10000;
  int restarts = 3;
  std::uint64_t seed = 0;
};

struct TuneResult {
  std::vector<double> currents;
  double objective = 0.0;
  int evals = 0;
  std::vector<std::pair<int, double>> trace;  // user-sense objective
};

namespace detail {

inline Scene scene_with_currents(const Scene& base, const std::vector<FreeCurrent>& frees,
                                 const std::vector<double>& x) {
  std::vector<Wire> ws(base.wires().begin(), base.wires().end());
  for (std::size_t i = 0; i < frees.size(); ++i)
    (frees[i].channel == Channel::Rf ? ws[frees[i].wire].i_rf : ws[frees[i].wire].i_dc) = x[i];
  return Scene(std::move(ws), base.omega_rf(), base.species(), base.constants(),
               base.standoff());
}

}  // namespace detail

/// Tunes the free currents with the bounded simplex search, starting from
/// the scene's current values (clamped into bounds).
inline TuneResult optimize_currents(const TuneProblem& problem) {
  const std::size_t n = problem.free_currents.size();
  if (n == 0) throw ConfigError("tune: no free currents");
  if (problem.bounds.size() != n)
    throw ConfigError("tune: bounds must match the number of free currents");
  if (problem.targets.empty()) throw ConfigError("tune: targets must be non-empty");
  for (const Vec3& t : problem.targets)
    if (is_excluded(problem.scene, t))
      throw ConfigError("tune: target lies inside the exclusion standoff");
  if (problem.mode == PotentialMode::Dressed && !(problem.scene.omega_rf() > 0.0))
    throw ModeError("tune: dressed mode requires omega_rf > 0");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = problem.free_currents[i];
    if (f.wire >= problem.scene.wires().size())
      throw ConfigError("tune: free current wire index out of range");
    for (std::size_t j = i + 1; j < n; ++j)
      if (problem.free_currents[j].wire == f.wire &&
          problem.free_currents[j].channel == f.channel)
        throw ConfigError("tune: duplicate free current");
  }

  std::vector<double> lo(n), hi(n), x0(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = problem.bounds[i].first;
    hi[i] = problem.bounds[i].second;
    if (!(lo[i] < hi[i])) throw ConfigError("tune: infeasible bounds (lo >= hi)");
    const auto& f = problem.free_currents[i];
    const Wire& w = problem.scene.wires()[f.wire];
    x0[i] = std::clamp(f.channel == Channel::Rf ? w.i_rf : w.i_dc, lo[i], hi[i]);
  }

  const double sense = problem.sense == TuneSense::Minimize ? 1.0 : -1.0;
  auto fn = [&](const std::vector<double>& x) {
    const Scene s = detail::scene_with_currents(problem.scene, problem.free_currents, x);
    return sense * objective(s, problem.targets, problem.mode);
  };

  SimplexOptions opts;
  opts.f_tolerance = problem.tolerance;
  opts.max_evals = problem.max_evals;
  opts.restarts = problem.restarts;
  opts.seed = problem.seed;
  const SimplexResult r = simplex_minimize(fn, lo, hi, x0, opts);

  TuneResult out;
  out.currents = r.x;
  out.evals = r.evals;
  const Scene best = detail::scene_with_currents(problem.scene, problem.free_currents, r.x);
  out.objective = objective(best, problem.targets, problem.mode);
  out.trace.reserve(r.trace.size());
  for (const auto& [e, f] : r.trace) out.trace.emplace_back(e, sense * f);
  return out;
}

}  // namespace nanotrap
