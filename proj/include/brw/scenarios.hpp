#pragma once

#include <string>
#include <vector>

#include "brw/config.hpp"

namespace brw {

struct Scenario {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

// Builtin scenario catalog. The infinite-points entry embeds a (theta, a)
// pair calibrated to m(theta) = 1 at construction time.
const std::vector<Scenario>& scenario_catalog();

const Scenario& find_scenario(const std::string& name);

}  // namespace brw
