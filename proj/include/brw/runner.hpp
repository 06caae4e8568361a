#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "brw/config.hpp"
#include "brw/verify.hpp"

namespace brw {

inline constexpr const char* kVersion = "brwlab 0.1.0";

// Column store of per-replicate observables.
struct SimResult {
  std::vector<int> recordedGens;  // ascending
  std::vector<std::vector<double>> wTheta;  // [gen index][replicate]
  std::vector<std::vector<double>> wAlpha;  // same shape
  std::vector<std::int32_t> extinctAt;      // -1 when never extinct
  std::vector<std::uint8_t> capped;
  std::vector<double> prunedMass;

  std::size_t replicates() const { return extinctAt.size(); }
  const std::vector<double>& theta_at(int gen) const;
  const std::vector<double>& alpha_at(int gen) const;
  bool has_gen(int gen) const;
};

// Runs the replicate budget. Deterministic in (config, seed) for any
// thread count: every replicate is keyed, workers write disjoint slots.
SimResult simulate_replicates(const ExperimentConfig& cfg, int threads);

void write_raw_csv(const SimResult& sim, const ExperimentConfig& cfg,
                   std::ostream& out);
SimResult load_raw_csv(std::istream& in);

struct CheckResult {
  std::string name;
  bool pass = false;
  bool insufficient = false;
  std::string details;
  json payload;
};

struct RunReport {
  std::string scenario;
  std::string configDigest;
  std::vector<CheckResult> checks;
  std::uint64_t replicates = 0;
  std::uint64_t extinct = 0;
  std::uint64_t cappedCount = 0;
  double wallSeconds = 0.0;
  std::string version = kVersion;

  bool overall_pass() const;
  json to_json() const;
};

struct RunOptions {
  int threads = 0;  // 0 = hardware concurrency
  bool overrideConditions = false;
  std::string outDir;       // empty = no artifacts written
  bool writeRawCsv = false;
};

// Simulates, runs the enabled checks, writes artifacts; throws ConfigError
// on invalid configs or failed admissibility conditions without override.
RunReport run_scenario(const ExperimentConfig& cfg, const RunOptions& opts);

// Same checks over a previously stored raw CSV.
RunReport run_checks(const ExperimentConfig& cfg, const SimResult& sim,
                     const std::string& outDir);

// Theoretical CF tables (cf_Q, cf_U0, mixture) for plotting or goldens.
void export_cf_tables(const ExperimentConfig& cfg,
                      const std::vector<double>& mixWeights,
                      const std::string& dir);

}  // namespace brw
