#include "brw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace brw {

json ToleranceSet::to_json() const {
  return json{{"cfSup", cfSup},
              {"tailRatioRel", tailRatioRel},
              {"hillAbs", hillAbs},
              {"seriesConstRel", seriesConstRel},
              {"calibrationResidual", calibrationResidual}};
}

ToleranceSet ToleranceSet::from_json(const json& j) {
  ToleranceSet t;
  t.cfSup = j.value("cfSup", t.cfSup);
  t.tailRatioRel = j.value("tailRatioRel", t.tailRatioRel);
  t.hillAbs = j.value("hillAbs", t.hillAbs);
  t.seriesConstRel = j.value("seriesConstRel", t.seriesConstRel);
  t.calibrationResidual = j.value("calibrationResidual", t.calibrationResidual);
  return t;
}

std::vector<double> TGridSpec::make() const {
  if (points < 2) throw ConfigError("tgrid: at least 2 points required");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[i] = tmin + (tmax - tmin) * i / (points - 1);
  return g;
}

json TGridSpec::to_json() const {
  return json{{"tmin", tmin}, {"tmax", tmax}, {"points", points}};
}

TGridSpec TGridSpec::from_json(const json& j) {
  TGridSpec t;
  t.tmin = j.value("tmin", t.tmin);
  t.tmax = j.value("tmax", t.tmax);
  t.points = j.value("points", t.points);
  return t;
}

json count_law_to_json(const CountLaw& law) {
  switch (law.kind()) {
    case CountLaw::Kind::Deterministic:
      return json{{"type", "deterministic"}, {"n", law.fixed_value()}};
    case CountLaw::Kind::Table:
      return json{{"type", "table"}, {"probs", law.table_probs()}};
    case CountLaw::Kind::ParetoTail:
      return json{{"type", "pareto"},
                  {"alpha", law.tail_alpha()},
                  {"d", law.tail_d()},
                  {"minCount", law.min_count()}};
  }
  throw ConfigError("count law: unknown kind");
}

CountLaw count_law_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "deterministic") return CountLaw::deterministic(j.at("n").get<int>());
  if (type == "table")
    return CountLaw::table(j.at("probs").get<std::vector<double>>());
  if (type == "pareto") {
    const double alpha = j.at("alpha").get<double>();
    const int minCount = j.value("minCount", 0);
    if (j.contains("mean"))
      return CountLaw::pareto_tail_with_mean(alpha, j.at("mean").get<double>(),
                                             minCount);
    return CountLaw::pareto_tail(alpha, j.at("d").get<double>(), minCount);
  }
  throw ConfigError("count law: unknown type '" + type + "'");
}

json displacement_to_json(const DisplacementLaw& law) {
  switch (law.kind) {
    case DisplacementLaw::Kind::Normal:
      return json{{"type", "normal"}, {"mean", law.p1}, {"variance", law.p2}};
    case DisplacementLaw::Kind::Exponential:
      return json{{"type", "exponential"}, {"rate", law.p1}};
    case DisplacementLaw::Kind::PointMass:
      return json{{"type", "point-mass"}, {"location", law.p1}};
    case DisplacementLaw::Kind::Uniform:
      return json{{"type", "uniform"}, {"lo", law.p1}, {"hi", law.p2}};
  }
  throw ConfigError("displacement law: unknown kind");
}

DisplacementLaw displacement_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "normal")
    return DisplacementLaw::normal(j.at("mean").get<double>(),
                                   j.at("variance").get<double>());
  if (type == "exponential")
    return DisplacementLaw::exponential(j.at("rate").get<double>());
  if (type == "point-mass")
    return DisplacementLaw::point_mass(j.at("location").get<double>());
  if (type == "uniform")
    return DisplacementLaw::uniform(j.at("lo").get<double>(),
                                    j.at("hi").get<double>());
  throw ConfigError("displacement law: unknown type '" + type + "'");
}

json law_to_json(const OffspringLaw& law) {
  switch (law.kind) {
    case OffspringLaw::Kind::GaltonWatson:
      return json{{"type", "galton-watson"},
                  {"count", count_law_to_json(law.count)}};
    case OffspringLaw::Kind::ParetoCount:
      return json{{"type", "pareto-count"},
                  {"count", count_law_to_json(law.count)},
                  {"displacement", displacement_to_json(law.disp)}};
    case OffspringLaw::Kind::InfinitePoints:
      return json{{"type", "infinite-points"},
                  {"klaw", count_law_to_json(law.count)},
                  {"ylaw", displacement_to_json(law.disp)},
                  {"a", law.a}};
    case OffspringLaw::Kind::Custom:
      throw ConfigError("law: Custom laws cannot be serialized");
  }
  throw ConfigError("law: unknown kind");
}

OffspringLaw law_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "galton-watson")
    return OffspringLaw::galton_watson(count_law_from_json(j.at("count")));
  if (type == "pareto-count")
    return OffspringLaw::pareto_count(
        count_law_from_json(j.at("count")),
        displacement_from_json(j.at("displacement")));
  if (type == "infinite-points")
    return OffspringLaw::infinite_points(
        count_law_from_json(j.at("klaw")),
        displacement_from_json(j.at("ylaw")), j.at("a").get<double>());
  throw ConfigError("law: unknown type '" + type + "'");
}

json ExperimentConfig::to_json() const {
  json p{{"maxGeneration", policy.maxGeneration},
         {"horizon", policy.horizon},
         {"lags", policy.lags},
         {"pruneEpsilon", policy.pruneEpsilon},
         {"populationCap", policy.populationCap},
         {"offspringTruncationEpsilon", policy.offspringTruncationEpsilon}};
  json j{{"schema", schema},
         {"scenario", scenario},
         {"description", description},
         {"law", law_to_json(law)},
         {"theta", theta},
         {"alpha", alpha},
         {"policy", std::move(p)},
         {"recordGenerations", recordGenerations},
         {"replicates", replicates},
         {"seed", seed},
         {"tolerances", tolerances.to_json()},
         {"tgrid", tgrid.to_json()},
         {"checks", checks}};
  if (!seriesCoefficients.empty()) j["seriesCoefficients"] = seriesCoefficients;
  if (!fddBetas.empty()) j["fddBetas"] = fddBetas;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  c.schema = j.value("schema", 1);
  if (c.schema != 1) throw ConfigError("config: unsupported schema version");
  c.scenario = j.value("scenario", std::string{});
  c.description = j.value("description", std::string{});
  c.law = law_from_json(j.at("law"));
  c.theta = j.at("theta").get<double>();
  c.alpha = j.at("alpha").get<double>();
  const json& p = j.at("policy");
  c.policy.maxGeneration = p.at("maxGeneration").get<int>();
  c.policy.horizon = p.at("horizon").get<int>();
  c.policy.lags = p.value("lags", std::vector<int>{0});
  c.policy.pruneEpsilon = p.value("pruneEpsilon", 1e-12);
  c.policy.populationCap = p.value("populationCap", std::uint64_t{1} << 62);
  c.policy.offspringTruncationEpsilon =
      p.value("offspringTruncationEpsilon", 1e-12);
  c.recordGenerations = j.value("recordGenerations", std::vector<int>{});
  c.seriesCoefficients = j.value("seriesCoefficients", std::vector<double>{});
  c.fddBetas = j.value("fddBetas", std::vector<std::vector<double>>{});
  c.replicates = j.at("replicates").get<std::uint64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tolerances"))
    c.tolerances = ToleranceSet::from_json(j.at("tolerances"));
  if (j.contains("tgrid")) c.tgrid = TGridSpec::from_json(j.at("tgrid"));
  c.checks = j.value("checks", std::vector<std::string>{});
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return from_json(j);
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw ConfigError("config: replicates >= 1 required");
  if (!(alpha > 1.0 && alpha < 2.0))
    throw ConfigError("config: alpha in (1,2) required");
  try {
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (int g : recordGenerations)
    if (g < 0 || g > policy.maxGeneration)
      throw ConfigError("config: recorded generation out of range");
  if (static_cast<int>(seriesCoefficients.size()) > policy.maxGeneration)
    throw ConfigError("config: series coefficients exceed maxGeneration");
  for (const auto& b : fddBetas)
    if (b.size() != policy.lags.size())
      throw ConfigError("config: fdd betas must match the lag count");
  if (!fddBetas.empty()) {
    // The Cramer-Wold coefficients assume coordinates at lags 0..r.
    for (std::size_t k = 0; k < policy.lags.size(); ++k)
      if (policy.lags[k] != static_cast<int>(k))
        throw ConfigError("config: fdd checks need contiguous lags 0..r");
  }
}

std::uint64_t ExperimentConfig::digest() const {
  json j = to_json();
  j.erase("description");  // free text, not semantics
  const std::string canon = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::digest_hex() const {
  std::ostringstream os;
  os << std::hex << digest();
  return os.str();
}

std::vector<int> ExperimentConfig::effective_record_generations() const {
  std::set<int> gens(recordGenerations.begin(), recordGenerations.end());
  const int M = policy.maxGeneration;
  gens.insert(0);
  gens.insert(M);
  gens.insert(policy.horizon);
  for (int r : policy.lags) gens.insert(policy.horizon - r);
  auto enabled = [&](const std::string& name) {
    return std::find(checks.begin(), checks.end(), name) != checks.end();
  };
  if (enabled("martingale"))
    for (int g = 0; g <= std::min(11, M); ++g) gens.insert(g);
  if (enabled("hill-w1") || enabled("tail-ratio")) gens.insert(1);
  if (enabled("series-tail"))
    for (int g = 0; g <= static_cast<int>(seriesCoefficients.size()); ++g)
      gens.insert(g);
  return {gens.begin(), gens.end()};
}

}  // namespace brw
