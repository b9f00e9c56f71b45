#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fieldlab/run.hpp"
#include "fieldlab/scenario.hpp"

using namespace fieldlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fieldlab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

bool mentions(const std::vector<FieldError>& errs, const std::string& key) {
  for (const auto& e : errs)
    if (e.key == key) return true;
  return false;
}

}  // namespace

TEST_CASE("defaults of a minimal document") {
  const Scenario s = parse_scenario("run: reconstruct\nsource:\n  kind: dipole\n");
  CHECK(s.run == RunKind::reconstruct);
  CHECK(s.source.kind == "dipole");
  CHECK(s.geometry.units == LengthUnit::wavelength);
  CHECK(s.geometry.inner_radius == 10);
  CHECK(s.geometry.outer_radius == 40);
  CHECK(s.geometry.observer_radius == 20);
  CHECK(s.tolerances.reconstruct == 0.01);
  CHECK(s.tolerances.cancellation == 1e-3);
  CHECK(s.numerics.surface_tolerance == 1e-3);
  CHECK(s.numerics.quadrature.tolerance == 1e-6);

  const Scenario c = parse_scenario("run: cancellation\n");
  CHECK(c.geometry.observer_radius == 60);
  const Scenario sc = parse_scenario("run: scaling\n");
  CHECK(sc.geometry.units == LengthUnit::support);
  CHECK(sc.sweep.ratio == doctest::Approx(std::pow(2.0, 0.75)));
  CHECK(sc.sweep.count == 5);
  const Scenario r = parse_scenario(
      "run: reconstruct\nsource:\n  kind: rotating\n  mode: 5\n  omega: 1.5\n");
  CHECK(r.tolerances.reconstruct == 0.02);
  CHECK(parse_scenario("run: field\n").geometry.random_points == 20);
}

TEST_CASE("inconsistent shell names both radii") {
  const std::string doc =
      "run: reconstruct\nsource:\n  kind: dipole\ngeometry:\n  inner_radius: 50\n"
      "  outer_radius: 40\n";
  try {
    parse_scenario(doc);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(mentions(e.errors, "geometry.inner_radius"));
    CHECK(mentions(e.errors, "geometry.outer_radius"));
    for (const auto& f : e.errors)
      if (f.key == "geometry.inner_radius") CHECK(f.line == 5);
  }
}

TEST_CASE("unknown run kind lists the valid kinds") {
  try {
    parse_scenario("run: radiate\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    for (const char* k :
         {"potential", "field", "decompose", "reconstruct", "cancellation", "scaling", "validate"})
      CHECK(what.find(k) != std::string::npos);
  }
  CHECK(run_kind_list() ==
        "potential, field, decompose, reconstruct, cancellation, scaling, validate");
}

TEST_CASE("unknown keys and bad values are reported") {
  try {
    parse_scenario("run: field\nsource:\n  kind: dipole\n  momnet: 2\n");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(mentions(e.errors, "source.momnet"));
  } catch (const ValidationError& e) {
    CHECK(mentions(e.errors, "source.momnet"));
  }
  CHECK_THROWS(parse_scenario("run: field\nsource:\n  kind: teapot\n"));
  CHECK_THROWS(parse_scenario("run: field\nnumerics:\n  mesh_level: 12\n"));
  CHECK_THROWS(parse_scenario("run: [unclosed\n"));
  CHECK_THROWS(parse_scenario("source:\n  kind: dipole\n", std::nullopt));
  CHECK(parse_scenario("source:\n  kind: dipole\n", RunKind::field).run == RunKind::field);
  CHECK_THROWS(parse_scenario("run: field\n", RunKind::scaling));
}

TEST_CASE("resolved scenario round-trips through its echo") {
  const Scenario s = parse_scenario(
      "run: scaling\nsource:\n  kind: rotating\n  mode: 4\n  omega: 1.8\nsweep:\n  count: 6\n"
      "seed: 99\n");
  const nlohmann::json j = to_json(s);
  const Scenario back = parse_scenario(j.dump());
  CHECK(to_json(back) == j);
  CHECK(back.seed == 99u);
  CHECK(back.source.rotating.mode == 4);
}

TEST_CASE("runs are deterministic and independent of the worker count") {
  const std::string doc =
      "run: potential\nsource:\n  kind: blob\ngeometry:\n  random_points: 6\n"
      "  point_radius: 12\nseed: 5\n";
  std::string first;
  for (int workers : {1, 3}) {
    Scenario s = parse_scenario(doc);
    s.workers = workers;
    s.output.dir = scratch("det" + std::to_string(workers)).string();
    const RunResult r = run_scenario(s);
    CHECK(r.exit_code == kExitOk);
    const std::string csv = slurp(r.csv_path);
    CHECK(csv.rfind(csv_header(), 0) == 0);
    if (first.empty())
      first = csv;
    else
      CHECK(csv == first);
    const auto j = nlohmann::json::parse(slurp(r.json_path));
    CHECK(j["run_kind"] == "potential");
    CHECK(j["version"] == kVersion);
    CHECK(j["exit_code"] == 0);
  }
  Scenario other = parse_scenario(doc);
  other.seed = 6;
  other.output.dir = scratch("det_seed").string();
  CHECK(slurp(run_scenario(other).csv_path) != first);
}

TEST_CASE("cancellation run succeeds") {
  Scenario s = parse_scenario("run: cancellation\nsource:\n  kind: dipole\n");
  s.output.dir = scratch("cancel").string();
  const RunResult r = run_scenario(s);
  CHECK(r.exit_code == kExitOk);
  CHECK(!r.rows.empty());
}

TEST_CASE("CSV formatting") {
  ResultRow row;
  row.quantity = "B";
  row.at = {0, 0, 2};
  row.t = 1.5;
  row.value = {0.1, 0, -3};
  const std::string csv = format_csv(RunKind::field, {row});
  CHECK(csv == std::string(csv_header()) +
                   "\nfield,B,2,0,0,1.5,0.10000000000000001,0,-3,0,0\n");
}
