#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "nanotrap/grid_io.hpp"
#include "nanotrap/hash.hpp"
#include "nanotrap/render.hpp"
#include "nanotrap/report.hpp"
#include "nanotrap/scene_config.hpp"

using namespace nanotrap;

namespace {

constexpr double nm = 1e-9;
constexpr double uA = 1e-6;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PotentialGrid sample_reference_grid(int n) {
  const Scene s = build_four_tube_cell(355.6 * nm, 256.8 * nm,
                                       {-15 * uA, 15 * uA, 15 * uA, -15 * uA},
                                       {-4 * uA, 4 * uA, 4 * uA, -4 * uA},
                                       (2.0 * std::numbers::pi) * 0.27e6);
  GridSpec spec;
  const double d = 355.6 * nm;
  spec.origin = {-d / 2, -d, -d};
  spec.counts = {n, n, n};
  spec.spacing = {d / (n - 1), 2 * d / (n - 1), 2 * d / (n - 1)};
  return sample_grid(s, spec, PotentialMode::Dressed);
}

}  // namespace

TEST_CASE("cell fixture parses to the reference builder scene") {
  const Scene parsed = parse_scene_config(slurp(std::string(FIXTURE_DIR) + "/cell.trap"));
  const Scene built = build_four_tube_cell(
      355.6 * nm, 256.8 * nm, {-15 * uA, 15 * uA, 15 * uA, -15 * uA},
      {-4 * uA, 4 * uA, 4 * uA, -4 * uA}, (2.0 * std::numbers::pi) * (0.27 * 1e6), {}, {},
      100 * nm);
  CHECK(parsed == built);
}

TEST_CASE("scene config round-trips exactly") {
  const Scene original = parse_scene_config(slurp(std::string(FIXTURE_DIR) + "/cell.trap"));
  const std::string text = serialize_scene_config(original);
  const Scene reparsed = parse_scene_config(text);
  CHECK(reparsed == original);
  CHECK(serialize_scene_config(reparsed) == text);

  const Scene stacked = parse_scene_config(slurp(std::string(FIXTURE_DIR) + "/stacked3.trap"));
  CHECK(parse_scene_config(serialize_scene_config(stacked)) == stacked);
}

TEST_CASE("scene config: located errors") {
  SECTION("unknown field carries its line number") {
    const std::string text = "builder = wires\nwire.1.kind = line\nwire.1.point = 0,0,0\n"
                             "wire.1.direction = 0,0,1\nbogus_field = 3\n";
    try {
      parse_scene_config(text);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
      CHECK(std::string(e.what()).find("bogus_field") != std::string::npos);
    }
  }

  SECTION("malformed number") {
    const std::string text = "builder = four_tube_cell\nfour_tube_cell.d = 12..3 nm\n"
                             "four_tube_cell.h = 1 nm\n"
                             "four_tube_cell.i_dc = 0,0,0,0\nfour_tube_cell.i_rf = 0,0,0,0\n";
    try {
      parse_scene_config(text);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("malformed") != std::string::npos);
    }
  }

  SECTION("missing required field names the field") {
    try {
      parse_scene_config("builder = four_tube_cell\nfour_tube_cell.d = 1 nm\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("four_tube_cell.h") != std::string::npos);
    }
  }

  SECTION("empty explicit wire list") {
    CHECK_THROWS_AS(parse_scene_config("builder = wires\n"), ConfigError);
  }

  SECTION("duplicate field") {
    CHECK_THROWS_AS(parse_scene_config("standoff = 1 nm\nstandoff = 2 nm\nbuilder = wires\n"),
                    ParseError);
  }

  SECTION("line without equals sign") {
    CHECK_THROWS_AS(parse_scene_config("builder four_tube_cell\n"), ParseError);
  }
}

TEST_CASE("unit suffixes convert exactly") {
  const std::string text =
      "rf_frequency = 0.27 MHz\nstandoff = 0.1 um\nbuilder = wires\n"
      "wire.1.kind = line\nwire.1.point = -128.4 nm, 0 m, 0.5 mm\n"
      "wire.1.direction = 0, 0, 1\nwire.1.i_dc = -15 \xC2\xB5"
      "A\nwire.1.i_rf = 0.004 mA\n";
  const Scene s = parse_scene_config(text);
  CHECK(s.omega_rf() == (2.0 * std::numbers::pi) * (0.27 * 1e6));
  CHECK(s.standoff() == 0.1 * 1e-6);
  CHECK(s.wires()[0].point.x == -128.4 * 1e-9);
  CHECK(s.wires()[0].point.z == 0.5 * 1e-3);
  CHECK(s.wires()[0].i_dc == -15 * 1e-6);
  CHECK(s.wires()[0].i_rf == 0.004 * 1e-3);
}

TEST_CASE("grid file: 2x2x2 payload layout") {
  PotentialGrid grid;
  grid.spec.origin = {0, 0, 0};
  grid.spec.spacing = {1e-9, 1e-9, 1e-9};
  grid.spec.counts = {2, 2, 2};
  grid.values.assign(8, 0.0);
  grid.mask.assign(8, 0);
  grid.mask[3] = 1;

  std::ostringstream out;
  write_grid(grid, out);
  const std::string bytes = out.str();
  const std::size_t header_end = bytes.find("\n\n");
  REQUIRE(header_end != std::string::npos);
  CHECK(bytes.substr(0, bytes.find('\n')) == "NANOTRAP-GRID v1");
  CHECK(bytes.size() - (header_end + 2) == 8 * 8 + 1);  // 64 value bytes + 1 mask byte
  CHECK(static_cast<unsigned char>(bytes.back()) == (1u << 3));

  std::istringstream in(bytes);
  const PotentialGrid back = read_grid(in);
  CHECK(back.spec == grid.spec);
  CHECK(back.mask == grid.mask);
  CHECK(std::memcmp(back.values.data(), grid.values.data(), 8 * sizeof(double)) == 0);
}

TEST_CASE("grid file round-trips a sampled grid bit-exactly") {
  const PotentialGrid grid = sample_reference_grid(21);
  std::ostringstream out;
  write_grid(grid, out);
  std::istringstream in(out.str());
  const PotentialGrid back = read_grid(in);
  CHECK(back.spec == grid.spec);
  CHECK(back.mode == grid.mode);
  CHECK(back.mask == grid.mask);
  CHECK(std::memcmp(back.values.data(), grid.values.data(),
                    grid.values.size() * sizeof(double)) == 0);

  std::ostringstream again;
  write_grid(back, again);
  CHECK(again.str() == out.str());
}

TEST_CASE("grid file: malformed inputs") {
  const PotentialGrid grid = sample_reference_grid(5);
  std::ostringstream out;
  write_grid(grid, out);
  const std::string bytes = out.str();

  SECTION("bad magic") {
    std::string corrupt = bytes;
    corrupt[0] = 'X';
    std::istringstream in(corrupt);
    CHECK_THROWS_AS(read_grid(in), FormatError);
  }

  SECTION("truncated payload") {
    std::istringstream in(bytes.substr(0, bytes.size() - 40));
    CHECK_THROWS_AS(read_grid(in), FormatError);
  }

  SECTION("counts/payload mismatch") {
    std::string corrupt = bytes;
    const auto pos = corrupt.find("counts 5 5 5");
    REQUIRE(pos != std::string::npos);
    corrupt.replace(pos, 12, "counts 5 5 6");  // claims more cells than present
    std::istringstream in(corrupt);
    CHECK_THROWS_AS(read_grid(in), FormatError);
  }

  SECTION("trailing garbage") {
    std::istringstream in(bytes + "x");
    CHECK_THROWS_AS(read_grid(in), FormatError);
  }
}

TEST_CASE("render: uniform and degenerate-clamp slices") {
  PotentialGrid grid;
  grid.spec.origin = {0, 0, 0};
  grid.spec.spacing = {1e-9, 1e-9, 1e-9};
  grid.spec.counts = {4, 3, 2};
  grid.values.assign(grid.spec.size(), 2.0e-28);
  grid.mask.assign(grid.spec.size(), 0);

  SECTION("constant slice renders one color") {
    const std::string ppm = render_slice(grid, 2, 0, 7e-28);
    CHECK(ppm.substr(0, 9) == "P6\n4 3\n25");
    const std::string pix = ppm.substr(ppm.find("255\n") + 4);
    REQUIRE(pix.size() == 4 * 3 * 3);
    for (std::size_t i = 3; i < pix.size(); ++i) CHECK(pix[i] == pix[i % 3]);
  }

  SECTION("clamp below the slice minimum renders the low color") {
    for (std::size_t f = 0; f < grid.values.size(); ++f) grid.values[f] = 1e-28 + f * 1e-30;
    const std::string ppm = render_slice(grid, 0, 1, 0.5e-28);
    const std::string pix = ppm.substr(ppm.find("255\n") + 4);
    for (std::size_t i = 0; i + 2 < pix.size(); i += 3) {
      CHECK(static_cast<unsigned char>(pix[i]) == 0);
      CHECK(static_cast<unsigned char>(pix[i + 1]) == 0);
      CHECK(static_cast<unsigned char>(pix[i + 2]) == 139);
    }
  }

  SECTION("out-of-range arguments") {
    CHECK_THROWS_AS(render_slice(grid, 3, 0, 1.0), ConfigError);
    CHECK_THROWS_AS(render_slice(grid, 0, 4, 1.0), ConfigError);
    CHECK_THROWS_AS(render_slice(grid, 1, -1, 1.0), ConfigError);
  }
}

TEST_CASE("render: reference cell mid-plane shows the trap pattern") {
  const PotentialGrid grid = sample_reference_grid(41);
  const int mid = 20;
  const std::string ppm = render_slice(grid, 2, mid, kDefaultRenderClamp);
  const int width = grid.spec.counts[0], height = grid.spec.counts[1];
  const std::string pix = ppm.substr(ppm.find("255\n") + 4);
  REQUIRE(pix.size() == static_cast<std::size_t>(width) * height * 3);
  auto rgb = [&](int u, int v) {  // u along x, v along y
    const std::size_t off = (static_cast<std::size_t>(height - 1 - v) * width + u) * 3;
    return std::array<int, 3>{static_cast<unsigned char>(pix[off]),
                              static_cast<unsigned char>(pix[off + 1]),
                              static_cast<unsigned char>(pix[off + 2])};
  };
  // the z = 0 slice cuts both z-direction wires: dark red exclusion disks
  int dark_red = 0;
  for (int v = 0; v < height; ++v)
    for (int u = 0; u < width; ++u)
      if (rgb(u, v) == std::array<int, 3>{139, 0, 0}) ++dark_red;
  CHECK(dark_red > 20);

  // center cell is warmer (greener) than the resonance ring around it
  const auto center = rgb(width / 2, height / 2);
  const auto ring = rgb(width / 2, height / 2 + 9);  // ~160 nm out in y
  CHECK(center[1] > ring[1]);
  CHECK(ring[2] >= center[2]);
}

TEST_CASE("extrema report JSON") {
  SECTION("empty extrema list is a valid document") {
    GridSpec spec;
    spec.origin = {0, 0, 0};
    spec.spacing = {1e-9, 1e-9, 1e-9};
    spec.counts = {2, 2, 2};
    const std::string doc = write_extrema_report({}, spec, PotentialMode::Dc, "fnv1a:0");
    const auto parsed = nlohmann::json::parse(doc);
    CHECK(parsed["extrema"].is_array());
    CHECK(parsed["extrema"].empty());
    CHECK(parsed["grid"]["mode"] == "dc");
    CHECK(parsed["scene_hash"] == "fnv1a:0");
  }

  SECTION("documents round-trip values and keep keys sorted") {
    Extremum e;
    e.kind = ExtremumKind::Min;
    e.index = {1, 2, 3};
    e.position = {1.25e-9, -2.5e-9, 0.1e-9};
    e.value = -1.234567890123456789e-28;
    e.isolated_3d = true;
    e.shell_margin = 3.5e-30;
    GridSpec spec;
    spec.origin = {-1e-7, -1e-7, -1e-7};
    spec.spacing = {1e-9, 2e-9, 3e-9};
    spec.counts = {11, 12, 13};
    const std::string doc = write_extrema_report({e}, spec, PotentialMode::Dressed, "fnv1a:42");

    const auto parsed = nlohmann::json::parse(doc);
    REQUIRE(parsed["extrema"].size() == 1);
    const auto& je = parsed["extrema"][0];
    CHECK(je["kind"] == "min");
    CHECK(je["index"] == nlohmann::json::array({1, 2, 3}));
    CHECK(je["isolated_3d"] == true);
    CHECK(je["value"].get<double>() == e.value);
    CHECK(je["shell_margin"].get<double>() == e.shell_margin);
    CHECK(je["position"][0].get<double>() == e.position.x);
    CHECK(parsed["grid"]["spacing"][2].get<double>() == 3e-9);

    // keys appear in sorted order at every level
    CHECK(doc.find("\"extrema\"") < doc.find("\"grid\""));
    CHECK(doc.find("\"grid\"") < doc.find("\"scene_hash\""));
    CHECK(doc.find("\"index\"") < doc.find("\"isolated_3d\""));
    CHECK(doc.find("\"isolated_3d\"") < doc.find("\"kind\""));
    CHECK(doc.find("\"kind\"") < doc.find("\"position\""));
    CHECK(doc.find("\"position\"") < doc.find("\"shell_margin\""));
    CHECK(doc.find("\"shell_margin\"") < doc.find("\"value\""));
    CHECK(doc.find("\"counts\"") < doc.find("\"mode\""));
    CHECK(doc.find("\"mode\"") < doc.find("\"origin\""));
    CHECK(doc.find("\"origin\"") < doc.find("\"spacing\""));
  }

  SECTION("paraboloid grid yields one minimum entry") {
    PotentialGrid grid;
    grid.spec.origin = {0, 0, 0};
    grid.spec.spacing = {1e-9, 1e-9, 1e-9};
    grid.spec.counts = {7, 7, 7};
    grid.values.resize(grid.spec.size());
    grid.mask.assign(grid.spec.size(), 0);
    for (int k = 0; k < 7; ++k)
      for (int j = 0; j < 7; ++j)
        for (int i = 0; i < 7; ++i)
          grid.values[grid.spec.flat(i, j, k)] =
              (i - 3.0) * (i - 3.0) + (j - 3.0) * (j - 3.0) + (k - 3.0) * (k - 3.0);
    auto extrema = find_local_extrema(grid);
    classify_isolation(grid, extrema, 1);
    const std::string doc =
        write_extrema_report(extrema, grid.spec, PotentialMode::Dc, "fnv1a:7");
    const auto parsed = nlohmann::json::parse(doc);
    REQUIRE(parsed["extrema"].size() == 1);
    CHECK(parsed["extrema"][0]["kind"] == "min");
    CHECK(parsed["extrema"][0]["index"] == nlohmann::json::array({3, 3, 3}));
    CHECK(parsed["extrema"][0]["isolated_3d"] == true);
  }
}

TEST_CASE("tune report JSON round-trips") {
  TuneResult r;
  r.currents = {-1.98e-5, 1.98e-5};
  r.objective = 1.649607218615245e-30;
  r.evals = 247;
  r.trace = {{1, 3.469072299713741e-28}, {12, 5e-29}, {247, 1.649607218615245e-30}};
  const std::string doc = write_tune_report(r, 3.469072299713741e-28);
  const auto parsed = nlohmann::json::parse(doc);
  CHECK(parsed["currents"][0].get<double>() == r.currents[0]);
  CHECK(parsed["objective"].get<double>() == r.objective);
  CHECK(parsed["initial_objective"].get<double>() == 3.469072299713741e-28);
  CHECK(parsed["evals"] == 247);
  REQUIRE(parsed["trace"].size() == 3);
  CHECK(parsed["trace"][2][1].get<double>() == r.trace[2].second);
}

TEST_CASE("fnv1a hash is stable") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64_hex("a") == "fnv1a:af63dc4c8601ec8c");
}
