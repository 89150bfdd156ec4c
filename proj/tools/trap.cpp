// trap: command-line front end for the nanotrap simulator.
//
// Subcommands: field, grid, extrema, render, tune.
// Exit codes: 0 success, 1 usage, 2 config/parse error, 3 numerical error.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nanotrap/nanotrap.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nanotrap::ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw nanotrap::ConfigError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw nanotrap::ConfigError("write failed for '" + path + "'");
}

nanotrap::Scene load_scene(const std::string& path) {
  return nanotrap::parse_scene_config(read_file(path));
}

std::string format_vec(const nanotrap::Vec3& v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%.17g, %.17g, %.17g)", v.x, v.y, v.z);
  return buf;
}

std::vector<nanotrap::Vec3> load_targets(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<nanotrap::Vec3> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;
    out.push_back(nanotrap::parse_point_string(line));
  }
  if (out.empty()) throw nanotrap::ConfigError("targets file '" + path + "' has no points");
  return out;
}

std::vector<nanotrap::FreeCurrent> parse_free_spec(const std::string& spec) {
  std::vector<nanotrap::FreeCurrent> out;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw nanotrap::ConfigError("free spec items must be dc:<wire> or rf:<wire>");
    const std::string chan = item.substr(0, colon);
    if (chan != "dc" && chan != "rf")
      throw nanotrap::ConfigError("free spec channel must be dc or rf");
    nanotrap::FreeCurrent f;
    f.channel = chan == "rf" ? nanotrap::Channel::Rf : nanotrap::Channel::Dc;
    try {
      f.wire = static_cast<std::size_t>(std::stoul(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw nanotrap::ConfigError("free spec wire index must be an integer");
    }
    out.push_back(f);
  }
  if (out.empty()) throw nanotrap::ConfigError("free spec is empty");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"nanotrap: crossed-wire magnetic nanotrap simulator"};
  app.require_subcommand(1);

  // field
  auto* field_cmd = app.add_subcommand("field", "print B_DC and B_RF at a point");
  std::string field_scene, field_point;
  field_cmd->add_option("-c,--config", field_scene, "scene config file")->required();
  field_cmd->add_option("-p,--point", field_point, "evaluation point x,y,z")->required();

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "sample a potential grid");
  std::string grid_scene, grid_spec, grid_mode = "dressed", grid_out;
  unsigned grid_threads = 0;
  grid_cmd->add_option("-c,--config", grid_scene, "scene config file")->required();
  grid_cmd->add_option("-g,--grid", grid_spec, "ox,oy,oz:sx,sy,sz:nx,ny,nz")->required();
  grid_cmd->add_option("-m,--mode", grid_mode, "dc|dressed")
      ->required()
      ->check(CLI::IsMember({"dc", "dressed"}));
  grid_cmd->add_option("-o,--output", grid_out, "output grid file")->required();
  grid_cmd->add_option("--threads", grid_threads, "worker threads (0 = auto, 1 = sequential)");

  // extrema
  auto* ext_cmd = app.add_subcommand("extrema", "find and classify local extrema");
  std::string ext_in, ext_out;
  int ext_shell = 3;
  ext_cmd->add_option("-i,--input", ext_in, "grid file")->required();
  ext_cmd->add_option("--shell", ext_shell, "isolation shell radius, cells")
      ->check(CLI::PositiveNumber);
  ext_cmd->add_option("-o,--output", ext_out, "output JSON report")->required();

  // render
  auto* render_cmd = app.add_subcommand("render", "render a slice as PPM");
  std::string render_in, render_axis, render_out;
  int render_index = 0;
  double render_clamp = nanotrap::kDefaultRenderClamp;
  render_cmd->add_option("-i,--input", render_in, "grid file")->required();
  render_cmd->add_option("--axis", render_axis, "slice axis x|y|z")
      ->required()
      ->check(CLI::IsMember({"x", "y", "z"}));
  render_cmd->add_option("--index", render_index, "slice index")->required();
  render_cmd->add_option("--clamp", render_clamp, "upper clamp, J");
  render_cmd->add_option("-o,--output", render_out, "output PPM file")->required();

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "optimize wire currents");
  std::string tune_scene, tune_targets, tune_free, tune_sense = "min", tune_mode = "dressed";
  std::string tune_bounds = "-20uA,20uA", tune_out;
  std::uint64_t tune_seed = 0;
  int tune_max_evals = 10000, tune_restarts = 3;
  double tune_tol = 1e-32;
  tune_cmd->add_option("-c,--config", tune_scene, "scene config file")->required();
  tune_cmd->add_option("--targets", tune_targets, "targets file, one x,y,z per line")
      ->required();
  tune_cmd->add_option("--free", tune_free, "free currents, e.g. dc:0,dc:1,rf:2")->required();
  tune_cmd->add_option("--sense", tune_sense, "min|max")
      ->check(CLI::IsMember({"min", "max"}));
  tune_cmd->add_option("--mode", tune_mode, "dc|dressed")
      ->check(CLI::IsMember({"dc", "dressed"}));
  tune_cmd->add_option("--bounds", tune_bounds, "lo,hi applied to every free current");
  tune_cmd->add_option("--seed", tune_seed, "restart seed");
  tune_cmd->add_option("--max-evals", tune_max_evals, "total evaluation budget");
  tune_cmd->add_option("--restarts", tune_restarts, "additional restarts");
  tune_cmd->add_option("--tol", tune_tol, "objective spread tolerance, J");
  tune_cmd->add_option("-o,--output", tune_out, "output JSON result")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  if (*field_cmd) {
    const nanotrap::Scene scene = load_scene(field_scene);
    const nanotrap::Vec3 p = nanotrap::parse_point_string(field_point);
    const nanotrap::FieldSample s = nanotrap::sample_fields(scene, p);
    std::cout << "B_dc = " << format_vec(s.b_dc) << " T\n"
              << "B_rf = " << format_vec(s.b_rf) << " T\n";
    return 0;
  }

  if (*grid_cmd) {
    const nanotrap::Scene scene = load_scene(grid_scene);
    const nanotrap::GridSpec spec = nanotrap::parse_grid_spec_string(grid_spec);
    const auto mode =
        grid_mode == "dc" ? nanotrap::PotentialMode::Dc : nanotrap::PotentialMode::Dressed;
    const nanotrap::PotentialGrid grid =
        nanotrap::sample_grid(scene, spec, mode, grid_threads);
    std::ostringstream out;
    nanotrap::write_grid(grid, out);
    write_file(grid_out, out.str());
    return 0;
  }

  if (*ext_cmd) {
    const std::string bytes = read_file(ext_in);
    std::istringstream in(bytes);
    const nanotrap::PotentialGrid grid = nanotrap::read_grid(in);
    auto extrema = nanotrap::find_local_extrema(grid);
    nanotrap::classify_isolation(grid, extrema, ext_shell);
    write_file(ext_out, nanotrap::write_extrema_report(extrema, grid.spec, grid.mode,
                                                       nanotrap::fnv1a64_hex(bytes)));
    return 0;
  }

  if (*render_cmd) {
    std::istringstream in(read_file(render_in));
    const nanotrap::PotentialGrid grid = nanotrap::read_grid(in);
    const int axis = render_axis == "x" ? 0 : (render_axis == "y" ? 1 : 2);
    write_file(render_out, nanotrap::render_slice(grid, axis, render_index, render_clamp));
    return 0;
  }

  if (*tune_cmd) {
    nanotrap::TuneProblem problem{load_scene(tune_scene)};
    problem.targets = load_targets(tune_targets);
    problem.free_currents = parse_free_spec(tune_free);
    problem.mode =
        tune_mode == "dc" ? nanotrap::PotentialMode::Dc : nanotrap::PotentialMode::Dressed;
    problem.sense = tune_sense == "max" ? nanotrap::TuneSense::Maximize
                                        : nanotrap::TuneSense::Minimize;
    const std::size_t comma = tune_bounds.find(',');
    if (comma == std::string::npos)
      throw nanotrap::ConfigError("bounds must be 'lo,hi'");
    const double lo = nanotrap::parse_current_string(tune_bounds.substr(0, comma));
    const double hi = nanotrap::parse_current_string(tune_bounds.substr(comma + 1));
    problem.bounds.assign(problem.free_currents.size(), {lo, hi});
    problem.tolerance = tune_tol;
    problem.max_evals = tune_max_evals;
    problem.restarts = tune_restarts;
    problem.seed = tune_seed;
    const double initial =
        nanotrap::objective(problem.scene, problem.targets, problem.mode);
    const nanotrap::TuneResult result = nanotrap::optimize_currents(problem);
    write_file(tune_out, nanotrap::write_tune_report(result, initial));
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const nanotrap::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const nanotrap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
