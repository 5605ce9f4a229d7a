// Batch driver: runs one experiment from a JSON config (or the desk preset),
// writes result.json plus the series CSVs, and exits 0 on all-pass, 1 on any
// failed verdict, 2 when a config problem or an inconclusive check prevents
// a clean verdict.
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kdecay/harness.hpp"

using namespace kdecay;

namespace {

void print_verdicts(const RunResult& result) {
  for (const auto& v : result.verdicts) {
    const char* tag =
        v.inconclusive ? "INCONCLUSIVE" : (v.pass ? "PASS" : "FAIL");
    std::printf("%-12s %-28s measured=%.6g expected=%.6g tol=%.6g", tag,
                v.name.c_str(), v.measured, v.expected, v.tolerance);
    if (!v.note.empty()) std::printf("  (%s)", v.note.c_str());
    std::printf("\n");
  }
}

int run(const std::string& experiment, const std::string& config_path,
        const std::string& out_dir) {
  RunConfig cfg = desk_preset(experiment);
  if (!config_path.empty()) {
    cfg = load_config(config_path, cfg);
    if (cfg.experiment != experiment)
      throw config_error("config: experiment '" + cfg.experiment +
                         "' does not match subcommand '" + experiment + "'");
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  cfg.validate();

  const RunResult result = run_experiment(cfg);
  const std::string path = write_result(result, cfg.output_dir);
  print_verdicts(result);
  std::printf("result: %s  (%.2f s, toolkit %s)\n", path.c_str(),
              result.elapsed_seconds, result.version.c_str());
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kdecay: kinetic decay toolkit experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string preset = "desk";

  const std::vector<std::string> names = {"spectrum", "decay", "besov",
                                          "rates", "validate"};
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(
        name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--preset", preset, "parameter preset")
        ->check(CLI::IsMember({"desk"}));
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return run(app.get_subcommands().front()->get_name(), config_path,
               out_dir);
  } catch (const config_error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
