#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "fracholder/config.hpp"
#include "fracholder/error.hpp"
#include "fracholder/experiments.hpp"
#include "fracholder/oracle.hpp"

namespace fh = fracholder;

namespace {

int run(const std::string& config_path, std::string out_dir, int jobs, const std::string& plots_flag) {
  const fh::ExperimentConfig config = fh::load_config(config_path);
  if (out_dir.empty()) out_dir = config.output_dir.empty() ? "out" : config.output_dir;
  bool plots = config.plots.value_or(true);
  if (!plots_flag.empty()) plots = plots_flag == "on";
  fh::RunOptions options;
  options.jobs = jobs;
  options.plots = plots;
  const fh::Outcome outcome = fh::run_experiment(config, options);
  fh::write_outcome(outcome, out_dir, plots);
  std::cout << config.name << " (" << fh::to_string(config.kind) << ") config " << outcome.report["config_hash"].get<std::string>()
            << "\n";
  for (const auto& c : outcome.report["checks"]) {
    std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << ": "
              << c["value"].dump() << " " << c["relation"].get<std::string>() << " " << c["threshold"].dump() << "\n";
  }
  std::cout << "report written to " << out_dir << "/report.json\n";
  return outcome.passed ? 0 : 2;
}

int list_domains(bool json) {
  const auto& catalog = fh::domain_catalog();
  if (json) {
    fh::Json arr = fh::Json::array();
    for (const auto& e : catalog) {
      arr.push_back({{"name", e.name}, {"expression", e.expression}, {"dim", e.dim}, {"note", e.note}});
    }
    std::cout << arr.dump(2) << "\n";
    return 0;
  }
  for (const auto& e : catalog) {
    std::cout << e.name << "  (" << e.dim << "D)  " << e.expression << "\n    " << e.note << "\n";
  }
  return 0;
}

int golden_regen(const std::string& path) {
  const std::string csv = fh::golden_csv(fh::golden_rows());
  if (path.empty()) {
    std::cout << csv;
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "cannot write " << path << "\n";
    return 1;
  }
  f << csv;
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional harmonic measure, capacity and Hoelder regularity experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, plots_flag, golden_path;
  int jobs = 1;
  bool json = false;

  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (default: output.dir from the config, else ./out)");
  run_cmd->add_option("--jobs", jobs, "Concurrent experiments within a suite")->check(CLI::Range(1, 256));
  run_cmd->add_option("--plots", plots_flag, "Emit SVG plots")->check(CLI::IsMember({"on", "off"}));

  auto* list_cmd = app.add_subcommand("list-domains", "Print the built-in domain catalog");
  list_cmd->add_flag("--json", json, "Print the catalog as a JSON array");

  auto* golden_cmd = app.add_subcommand("golden-regen", "Regenerate the ball oracle reference CSV");
  golden_cmd->add_option("--out", golden_path, "Destination file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return run(config_path, out_dir, jobs, plots_flag);
    if (*list_cmd) return list_domains(json);
    if (*golden_cmd) return golden_regen(golden_path);
  } catch (const fh::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
