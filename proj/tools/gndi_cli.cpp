#include "gndi/sim.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;     // bad arguments, unreadable or invalid config
constexpr int kExitDiverged = 2;  // a run set its instability or divergence flag

gndi::ScenarioConfig load_or_exit(const std::string& path) {
  try {
    return gndi::load_scenario(path);
  } catch (const gndi::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::exit(kExitUsage);
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    std::exit(kExitUsage);
  }
  os << text;
}

void write_run_outputs(const gndi::SimResult& res, const gndi::ScenarioConfig& cfg,
                       const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
    std::exit(kExitUsage);
  }
  std::ofstream csv(out_dir / cfg.csv_name, std::ios::binary);
  if (!csv) {
    std::cerr << "error: cannot open " << (out_dir / cfg.csv_name) << " for writing\n";
    std::exit(kExitUsage);
  }
  gndi::write_timeseries_csv(csv, res.rows);
  write_file(out_dir / cfg.summary_name, gndi::format_summary(res.summary));
}

bool diverged(const gndi::RunSummary& s) { return s.unstable || s.saturated_divergence; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric attitude-control scenario runner"};
  app.require_subcommand(1);

  std::string certify_config;
  CLI::App* cmd_certify = app.add_subcommand(
      "certify", "Check gain certificates and bandwidth ratios for a scenario");
  cmd_certify->add_option("config", certify_config, "scenario file")->required();

  std::string run_config;
  std::string run_out = ".";
  CLI::App* cmd_run =
      app.add_subcommand("run", "Simulate one scenario; write CSV and summary");
  cmd_run->add_option("config", run_config, "scenario file")->required();
  cmd_run->add_option("--out", run_out, "output directory (created if missing)");

  std::vector<std::string> compare_configs;
  std::string compare_out = ".";
  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "Simulate several scenarios and print a comparison table");
  cmd_compare->add_option("configs", compare_configs, "scenario files")
      ->expected(2, -1)
      ->required();
  cmd_compare->add_option("--out", compare_out, "output directory (created if missing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (cmd_certify->parsed()) {
    const gndi::ScenarioConfig cfg = load_or_exit(certify_config);
    // Verdicts are data: an infeasible certificate is a successful answer.
    std::cout << format_certification(gndi::certify(cfg));
    return kExitOk;
  }

  if (cmd_run->parsed()) {
    const gndi::ScenarioConfig cfg = load_or_exit(run_config);
    const gndi::SimResult res = gndi::run_scenario(cfg);
    write_run_outputs(res, cfg, run_out);
    std::cout << format_summary(res.summary);
    return diverged(res.summary) ? kExitDiverged : kExitOk;
  }

  // compare
  std::vector<gndi::RunSummary> summaries;
  bool any_diverged = false;
  for (const std::string& path : compare_configs) {
    const gndi::ScenarioConfig cfg = load_or_exit(path);
    const gndi::SimResult res = gndi::run_scenario(cfg);
    write_run_outputs(res, cfg, compare_out);
    summaries.push_back(res.summary);
    any_diverged = any_diverged || diverged(res.summary);
  }
  std::cout << format_comparison(summaries);
  return any_diverged ? kExitDiverged : kExitOk;
}
