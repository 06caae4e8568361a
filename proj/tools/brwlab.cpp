#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "brw/config.hpp"
#include "brw/runner.hpp"
#include "brw/scenarios.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonArgs {
  std::string configPath;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicates;
  int threads = 0;
  std::string outDir = "out";
  bool overrideConditions = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool withOut = true) {
  cmd->add_option("--config", args.configPath, "Path to a config JSON file");
  cmd->add_option("--scenario", args.scenario, "Builtin scenario name");
  cmd->add_option("--seed", args.seed, "RNG seed override");
  cmd->add_option("--replicates", args.replicates, "Replicate budget override");
  cmd->add_option("--threads", args.threads, "Worker threads (0 = auto)");
  if (withOut) cmd->add_option("--out", args.outDir, "Output directory");
  cmd->add_flag("--override-conditions", args.overrideConditions,
                "Run even if admissibility conditions fail");
}

brw::ExperimentConfig resolve_config(const CommonArgs& args) {
  brw::ExperimentConfig cfg;
  if (!args.configPath.empty())
    cfg = brw::ExperimentConfig::load_file(args.configPath);
  else if (!args.scenario.empty())
    cfg = brw::find_scenario(args.scenario).config;
  else
    throw brw::ConfigError("either --config or --scenario is required");
  if (args.seed) cfg.seed = *args.seed;
  if (args.replicates) cfg.replicates = *args.replicates;
  cfg.validate();
  return cfg;
}

void print_report(const brw::RunReport& report) {
  for (const auto& c : report.checks) {
    const char* tag = c.pass ? "PASS" : (c.insufficient ? "SKIP" : "FAIL");
    std::cout << "[" << tag << "] " << c.name << ": " << c.details << "\n";
  }
  std::cout << "replicates=" << report.replicates
            << " extinct=" << report.extinct
            << " capped=" << report.cappedCount << " wall="
            << report.wallSeconds << "s digest=" << report.configDigest
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for branching random walk "
               "martingale fluctuations"};
  app.require_subcommand(1);

  CommonArgs simArgs, verArgs, cfArgs;

  auto* simulate = app.add_subcommand(
      "simulate", "Run replicates and write the raw per-replicate CSV");
  add_common(simulate, simArgs);

  auto* verify = app.add_subcommand(
      "verify", "Run the configured checks on fresh or stored samples");
  add_common(verify, verArgs);
  std::string verifyInput;
  verify->add_option("--in", verifyInput,
                     "Raw CSV from a previous simulate run");

  auto* scenarios =
      app.add_subcommand("scenarios", "List the builtin scenario catalog");

  auto* calibrate = app.add_subcommand(
      "calibrate", "Solve m(theta) = target for the infinite-points law");
  double calibA = 10.0, calibTarget = 1.0, calibKAlpha = 1.5,
         calibKMean = 1.25, calibYRate = 1.0;
  calibrate->add_option("--a", calibA, "Lattice spacing a");
  calibrate->add_option("--target", calibTarget, "Target m(theta)");
  calibrate->add_option("--k-alpha", calibKAlpha, "Tail index of K");
  calibrate->add_option("--k-mean", calibKMean, "Mean of K (> 1)");
  calibrate->add_option("--y-rate", calibYRate, "Rate of the Exp(Y) law");

  auto* cfTable = app.add_subcommand(
      "cf-table", "Export theoretical CF tables (cf_Q, cf_U0, mixture)");
  add_common(cfTable, cfArgs);
  std::string weightsPath;
  cfTable->add_option("--weights", weightsPath,
                      "One mixing weight per line for the mixture table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfigError;
  }

  try {
    if (simulate->parsed()) {
      auto cfg = resolve_config(simArgs);
      const auto sim = brw::simulate_replicates(cfg, simArgs.threads);
      std::filesystem::create_directories(simArgs.outDir);
      std::ofstream out(simArgs.outDir + "/raw.csv");
      brw::write_raw_csv(sim, cfg, out);
      std::cout << "wrote " << simArgs.outDir << "/raw.csv ("
                << sim.replicates() << " replicates, digest "
                << cfg.digest_hex() << ")\n";
      return kExitPass;
    }
    if (verify->parsed()) {
      auto cfg = resolve_config(verArgs);
      brw::RunReport report;
      if (!verifyInput.empty()) {
        std::ifstream in(verifyInput);
        if (!in) throw brw::ConfigError("cannot open " + verifyInput);
        const auto sim = brw::load_raw_csv(in);
        std::filesystem::create_directories(verArgs.outDir);
        report = brw::run_checks(cfg, sim, verArgs.outDir);
        std::ofstream rep(verArgs.outDir + "/report.json");
        rep << report.to_json().dump(2) << "\n";
      } else {
        brw::RunOptions opts;
        opts.threads = verArgs.threads;
        opts.overrideConditions = verArgs.overrideConditions;
        opts.outDir = verArgs.outDir;
        report = brw::run_scenario(cfg, opts);
      }
      print_report(report);
      return report.overall_pass() ? kExitPass : kExitCheckFailure;
    }
    if (scenarios->parsed()) {
      for (const auto& s : brw::scenario_catalog())
        std::cout << s.name << ": " << s.description << "\n  law "
                  << s.config.law.describe() << ", theta=" << s.config.theta
                  << ", alpha=" << s.config.alpha
                  << ", M=" << s.config.policy.maxGeneration
                  << ", n=" << s.config.policy.horizon
                  << ", replicates=" << s.config.replicates << "\n";
      return kExitPass;
    }
    if (calibrate->parsed()) {
      const auto klaw =
          brw::CountLaw::pareto_tail_with_mean(calibKAlpha, calibKMean, 1);
      const auto ylaw = brw::DisplacementLaw::exponential(calibYRate);
      const auto [theta, a] =
          brw::calibrate_infinite_example(klaw, ylaw, calibA, calibTarget);
      const auto law = brw::OffspringLaw::infinite_points(klaw, ylaw, a);
      std::cout << "theta=" << theta << " a=" << a << " m(theta)="
                << brw::laplace_m(law, theta)
                << " kappa=" << brw::kappa(law, theta, calibKAlpha) << "\n";
      return kExitPass;
    }
    if (cfTable->parsed()) {
      auto cfg = resolve_config(cfArgs);
      std::vector<double> weights;
      if (!weightsPath.empty()) {
        std::ifstream in(weightsPath);
        if (!in) throw brw::ConfigError("cannot open " + weightsPath);
        double w;
        while (in >> w) weights.push_back(w);
      }
      brw::export_cf_tables(cfg, weights, cfArgs.outDir);
      std::cout << "wrote CF tables to " << cfArgs.outDir << "\n";
      return kExitPass;
    }
  } catch (const brw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitConfigError;
}
