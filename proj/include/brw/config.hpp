#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "brw/engine.hpp"
#include "brw/laws.hpp"

namespace brw {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ToleranceSet {
  double cfSup = 0.05;
  double tailRatioRel = 0.15;
  double hillAbs = 0.10;
  double seriesConstRel = 0.20;
  double calibrationResidual = 1e-10;

  json to_json() const;
  static ToleranceSet from_json(const json& j);
};

struct TGridSpec {
  double tmin = -5.0;
  double tmax = 5.0;
  int points = 81;

  std::vector<double> make() const;
  json to_json() const;
  static TGridSpec from_json(const json& j);
};

// Serialization of the law vocabulary (Custom laws are API-only and are
// rejected here).
json law_to_json(const OffspringLaw& law);
OffspringLaw law_from_json(const json& j);
json count_law_to_json(const CountLaw& law);
CountLaw count_law_from_json(const json& j);
json displacement_to_json(const DisplacementLaw& law);
DisplacementLaw displacement_from_json(const json& j);

// Full scenario description. Round-trips losslessly through JSON; the
// digest covers exactly the semantically meaningful fields.
struct ExperimentConfig {
  int schema = 1;
  std::string scenario;
  std::string description;
  OffspringLaw law;
  double theta = 0.0;
  double alpha = 1.5;
  SimulationPolicy policy;
  std::vector<int> recordGenerations;
  std::vector<double> seriesCoefficients;
  std::vector<std::vector<double>> fddBetas;
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 1;
  ToleranceSet tolerances;
  TGridSpec tgrid;
  std::vector<std::string> checks;

  json to_json() const;
  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig load_file(const std::string& path);

  void validate() const;  // throws ConfigError
  std::uint64_t digest() const;
  std::string digest_hex() const;

  // recordGenerations plus everything the enabled checks consume.
  std::vector<int> effective_record_generations() const;
};

}  // namespace brw
