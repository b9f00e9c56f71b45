// fieldlab: scenario-driven front end.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fieldlab/run.hpp"

namespace {

int fail(int code, const std::string& msg) {
  std::cerr << "fieldlab: " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fieldlab;
  CLI::App app{"Retarded potentials, Kirchhoff boundary terms and far-field scaling"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config, out;
  int workers = -1;
  long long seed = -1;
  bool quiet = false;
  for (const char* name : {"potential", "field", "decompose", "reconstruct", "cancellation",
                           "scaling", "validate"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run a ") + name + " scenario");
    sub->add_option("--config", config, "scenario file (YAML or JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--workers", workers, "worker threads (0 = FIELDLAB_WORKERS or all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "seed for randomized probe placement")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", quiet, "suppress progress output");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const auto kind = parse_run_kind(app.get_subcommands().front()->get_name());

  std::ifstream in(config, std::ios::binary);
  if (!in) return fail(kExitConfig, "cannot read " + config);
  std::stringstream text;
  text << in.rdbuf();

  Scenario s;
  try {
    s = parse_scenario(text.str(), kind);
  } catch (const Error& e) {
    return fail(kExitConfig, e.what());
  }
  if (!out.empty()) s.output.dir = out;
  if (workers >= 0) s.workers = workers;
  if (seed >= 0) s.seed = static_cast<std::uint64_t>(seed);

  try {
    const RunResult r = run_scenario(s, quiet ? nullptr : &std::cerr);
    if (!quiet) {
      std::cerr << "wrote " << r.csv_path << " and " << r.json_path << '\n';
      if (r.exit_code == kExitIdentity) std::cerr << "identity check failed\n";
      if (r.exit_code == kExitConvergence) std::cerr << "numerical convergence flags raised\n";
    }
    return r.exit_code;
  } catch (const MeshTooCoarse& e) {
    return fail(kExitConvergence, e.what());
  } catch (const GeometryViolation& e) {
    return fail(kExitConfig, e.what());
  } catch (const TransientRegime& e) {
    return fail(kExitConfig, e.what());
  } catch (const std::exception& e) {
    return fail(kExitConfig, e.what());
  }
}
