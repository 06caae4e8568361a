#include "brw/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace brw {

namespace {

// Shared heavy-tailed count law: discretized Pareto with tail index 3/2,
// d solved so that E[N] = 2.
CountLaw heyde_count_law() {
  return CountLaw::pareto_tail_with_mean(1.5, 2.0, 0);
}

ExperimentConfig gw_heyde() {
  ExperimentConfig c;
  c.scenario = "gw-heyde";
  c.description =
      "Galton-Watson counts with Pareto tail index 1.5 and mean 2, theta=0; "
      "the classical normalized-population fluctuation setting";
  c.law = OffspringLaw::galton_watson(heyde_count_law());
  c.theta = 0.0;
  c.alpha = 1.5;
  c.policy.maxGeneration = 30;
  c.policy.horizon = 12;
  c.policy.lags = {0, 1, 2};
  c.policy.pruneEpsilon = 0.0;  // exact trees; weights are equal anyway
  c.replicates = 1000000;
  c.seed = 20260810;
  c.fddBetas = {{1.0, 1.0, 1.0}, {1.0, -1.0, 0.0}};
  c.checks = {"martingale", "hill-w1", "hill-wm",
              "tail-ratio", "mixture-cf", "fdd"};
  return c;
}

ExperimentConfig pareto_normal() {
  ExperimentConfig c;
  c.scenario = "pareto-normal";
  c.description =
      "Pareto-tailed brood size (index 1.5, mean 2) with iid standard "
      "normal displacements at theta=0.5";
  c.law = OffspringLaw::pareto_count(heyde_count_law(),
                                     DisplacementLaw::normal(0.0, 1.0));
  c.theta = 0.5;
  c.alpha = 1.5;
  c.policy.maxGeneration = 14;
  c.policy.horizon = 6;
  c.policy.lags = {0, 1};
  c.policy.pruneEpsilon = 1e-12;
  c.replicates = 100000;
  c.seed = 20260811;
  c.checks = {"martingale", "hill-w1"};
  return c;
}

ExperimentConfig infinite_points() {
  ExperimentConfig c;
  c.scenario = "infinite-points";
  c.description =
      "Point process with infinitely many points: K geometric-tail copies "
      "of Exp(1) then the lattice a*k, calibrated so m(theta) = 1";
  const CountLaw klaw = CountLaw::pareto_tail_with_mean(1.5, 1.25, 1);
  const DisplacementLaw ylaw = DisplacementLaw::exponential(1.0);
  const double a = 10.0;
  const auto [theta, aOut] = calibrate_infinite_example(klaw, ylaw, a, 1.0);
  c.law = OffspringLaw::infinite_points(klaw, ylaw, aOut);
  c.theta = theta;
  c.alpha = 1.5;
  c.policy.maxGeneration = 12;
  c.policy.horizon = 10;
  c.policy.lags = {0, 1};
  c.policy.pruneEpsilon = 1e-9;
  c.policy.offspringTruncationEpsilon = 1e-4;
  c.policy.populationCap = 1u << 22;
  c.replicates = 10000;
  c.seed = 20260812;
  c.checks = {"martingale", "calibration"};
  return c;
}

ExperimentConfig series_alternating() {
  ExperimentConfig c;
  c.scenario = "series-alternating";
  c.description =
      "Alternating weighted increment series sum_j (-1)^j (W_{j+1} - W_j) "
      "over the gw-heyde law; verifies the two-sided tail constants";
  c.law = OffspringLaw::galton_watson(heyde_count_law());
  c.theta = 0.0;
  c.alpha = 1.5;
  c.policy.maxGeneration = 16;
  c.policy.horizon = 8;
  c.policy.lags = {0};
  c.policy.pruneEpsilon = 0.0;
  c.replicates = 400000;
  c.seed = 20260813;
  c.seriesCoefficients.resize(16);
  for (std::size_t j = 0; j < c.seriesCoefficients.size(); ++j)
    c.seriesCoefficients[j] = (j % 2 == 0) ? 1.0 : -1.0;
  c.checks = {"martingale", "series-tail"};
  return c;
}

}  // namespace

const std::vector<Scenario>& scenario_catalog() {
  static const std::vector<Scenario> catalog = [] {
    std::vector<Scenario> v;
    for (auto cfg : {gw_heyde(), pareto_normal(), infinite_points(),
                     series_alternating()}) {
      cfg.validate();
      v.push_back({cfg.scenario, cfg.description, std::move(cfg)});
    }
    return v;
  }();
  return catalog;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : scenario_catalog())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace brw
