#include "brw/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "brw/scenarios.hpp"
#include "brw/stable.hpp"

namespace brw {

namespace fs = std::filesystem;

const std::vector<double>& SimResult::theta_at(int gen) const {
  const auto it =
      std::lower_bound(recordedGens.begin(), recordedGens.end(), gen);
  if (it == recordedGens.end() || *it != gen)
    throw std::out_of_range("SimResult: generation not recorded");
  return wTheta[static_cast<std::size_t>(it - recordedGens.begin())];
}

const std::vector<double>& SimResult::alpha_at(int gen) const {
  const auto it =
      std::lower_bound(recordedGens.begin(), recordedGens.end(), gen);
  if (it == recordedGens.end() || *it != gen)
    throw std::out_of_range("SimResult: generation not recorded");
  return wAlpha[static_cast<std::size_t>(it - recordedGens.begin())];
}

bool SimResult::has_gen(int gen) const {
  return std::binary_search(recordedGens.begin(), recordedGens.end(), gen);
}

SimResult simulate_replicates(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const LawContext ctx = LawContext::make(cfg.law, cfg.theta, cfg.alpha);
  const auto gens = cfg.effective_record_generations();
  const std::size_t R = cfg.replicates;

  SimResult sim;
  sim.recordedGens = gens;
  sim.wTheta.assign(gens.size(), std::vector<double>(R));
  sim.wAlpha.assign(gens.size(), std::vector<double>(R));
  sim.extinctAt.assign(R, -1);
  sim.capped.assign(R, 0);
  sim.prunedMass.assign(R, 0.0);

  int T = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (T < 1) T = 1;
  T = static_cast<int>(std::min<std::size_t>(T, R));

  std::atomic<std::size_t> nextBlock{0};
  constexpr std::size_t kBlock = 256;
  std::atomic<bool> failed{false};
  std::string firstError;
  std::mutex errMutex;

  auto work = [&]() {
    try {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t b = nextBlock.fetch_add(1);
        const std::size_t lo = b * kBlock;
        if (lo >= R) break;
        const std::size_t hi = std::min(lo + kBlock, R);
        for (std::size_t rep = lo; rep < hi; ++rep) {
          const MartingalePath p =
              simulate_path(ctx, cfg.policy, cfg.seed, rep);
          for (std::size_t g = 0; g < gens.size(); ++g) {
            sim.wTheta[g][rep] = p.wTheta[static_cast<std::size_t>(gens[g])];
            sim.wAlpha[g][rep] =
                p.wAlphaTheta[static_cast<std::size_t>(gens[g])];
          }
          sim.extinctAt[rep] = p.extinctAt ? *p.extinctAt : -1;
          sim.capped[rep] = p.capped ? 1 : 0;
          sim.prunedMass[rep] = p.prunedMassBound;
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(errMutex);
      if (!failed.exchange(true)) firstError = e.what();
    }
  };

  if (T == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (int i = 0; i < T; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("simulate: " + firstError);
  return sim;
}

namespace {

void append_double(std::string& row, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  row += buf;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

MeanSe mean_se(const std::vector<double>& a, const std::vector<double>& b,
               const std::vector<std::uint8_t>& skip) {
  // mean and standard error of a-b over unskipped entries (b may be empty)
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (skip[i]) continue;
    s += b.empty() ? a[i] : a[i] - b[i];
    ++n;
  }
  MeanSe out;
  out.count = n;
  if (n == 0) return out;
  out.mean = s / static_cast<double>(n);
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (skip[i]) continue;
    const double d = (b.empty() ? a[i] : a[i] - b[i]) - out.mean;
    sq += d * d;
  }
  out.se = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1) /
                             static_cast<double>(n))
                 : 0.0;
  return out;
}

std::vector<double> filtered(const std::vector<double>& v,
                             const std::vector<std::uint8_t>& skip) {
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!skip[i]) out.push_back(v[i]);
  return out;
}

void write_ecf_table(const std::string& path, const std::string& digest,
                     std::span<const double> grid,
                     std::span<const std::complex<double>> emp,
                     std::span<const std::complex<double>> theo) {
  std::ofstream out(path);
  out << "# digest=" << digest << "\n";
  out << "t,reEmp,imEmp,reTheo,imTheo\n";
  char buf[220];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", grid[i],
                  emp[i].real(), emp[i].imag(), theo[i].real(),
                  theo[i].imag());
    out << buf;
  }
}

CheckResult check_martingale(const ExperimentConfig& cfg,
                             const SimResult& sim) {
  CheckResult res;
  res.name = "martingale";
  const std::size_t usable =
      sim.replicates() -
      static_cast<std::size_t>(
          std::count(sim.capped.begin(), sim.capped.end(), 1));
  if (usable < 100) {
    res.insufficient = true;
    res.details = "insufficient-sample: fewer than 100 uncapped replicates";
    return res;
  }
  const int M = cfg.policy.maxGeneration;
  bool allOk = true;
  double worstZ = 0.0;
  std::string worst;
  json steps = json::array();
  auto note = [&](const std::string& label, const MeanSe& m, double target) {
    const double dev = std::abs(m.mean - target);
    const double z = m.se > 0.0 ? dev / m.se : (dev <= 1e-12 ? 0.0 : 1e9);
    const bool ok = dev <= 5.0 * m.se + 1e-12;
    allOk = allOk && ok;
    if (z > worstZ) {
      worstZ = z;
      worst = label;
    }
    steps.push_back(json{{"check", label},
                         {"mean", m.mean},
                         {"target", target},
                         {"se", m.se},
                         {"pass", ok}});
  };
  for (int n = 0; n <= std::min(10, M - 1); ++n) {
    const auto m =
        mean_se(sim.theta_at(n + 1), sim.theta_at(n), sim.capped);
    note("E[W_" + std::to_string(n + 1) + "-W_" + std::to_string(n) + "]=0",
         m, 0.0);
  }
  note("E[W_M]=1", mean_se(sim.theta_at(M), {}, sim.capped), 1.0);
  for (int n = 1; n <= std::min(10, M); ++n)
    note("E[W_" + std::to_string(n) + "(alpha theta)]=1",
         mean_se(sim.alpha_at(n), {}, sim.capped), 1.0);
  res.pass = allOk;
  res.payload = json{{"steps", std::move(steps)}, {"worstZ", worstZ},
                     {"worst", worst}, {"usable", usable}};
  std::ostringstream os;
  os << "all means within 5 SE; worst |z|=" << worstZ << " at " << worst;
  res.details = os.str();
  return res;
}

CheckResult check_hill(const ExperimentConfig& cfg, const SimResult& sim,
                       int gen, const std::string& name) {
  CheckResult res;
  res.name = name;
  const auto samples = filtered(sim.theta_at(gen), sim.capped);
  try {
    const auto est = hill_estimator(samples, 0.01);
    res.pass = std::abs(est.index - cfg.alpha) <= cfg.tolerances.hillAbs;
    res.payload = json{{"index", est.index},
                       {"stderr", est.stderr_},
                       {"k", est.k},
                       {"predicted", cfg.alpha}};
    try {
      res.payload["indexTop0p1"] = hill_estimator(samples, 0.001).index;
    } catch (const std::exception&) {
      // deep-tail diagnostic unavailable at this sample size
    }
    std::ostringstream os;
    os << "Hill index " << est.index << " +/- " << est.stderr_ << " vs "
       << cfg.alpha;
    res.details = os.str();
  } catch (const std::invalid_argument& e) {
    res.insufficient = true;
    res.details = std::string("insufficient-sample: ") + e.what();
  }
  return res;
}

CheckResult check_tail_ratio(const ExperimentConfig& cfg,
                             const SimResult& sim) {
  CheckResult res;
  res.name = "tail-ratio";
  const auto w = filtered(sim.theta_at(cfg.policy.maxGeneration), sim.capped);
  const auto w1 = filtered(sim.theta_at(1), sim.capped);
  const double k = kappa(cfg.law, cfg.theta, cfg.alpha);
  if (w.size() < 100000 || w1.size() < 100000) {
    res.insufficient = true;
    res.details = "insufficient-sample: tail ratio needs >= 1e5 samples";
    return res;
  }
  try {
    const TailVerdict v = tail_ratio_check(w, w1, k, {0.99, 0.999},
                                           cfg.tolerances.tailRatioRel);
    res.pass = v.pass;
    res.details = v.details;
    res.payload = json{{"estimated", v.estimatedConstant},
                       {"predicted", v.predictedConstant},
                       {"windowLo", v.windowLo},
                       {"windowHi", v.windowHi},
                       {"kappa", k}};
    // trend diagnostic: the same median one decade deeper into the tail
    try {
      const TailVerdict deep = tail_ratio_check(
          w, w1, k, {0.999, 0.9999}, cfg.tolerances.tailRatioRel);
      res.payload["deepEstimate"] = deep.estimatedConstant;
      res.payload["deepWindowLo"] = deep.windowLo;
      res.payload["deepWindowHi"] = deep.windowHi;
    } catch (const std::exception&) {
      // too few samples for the deep window; omit
    }
  } catch (const std::exception& e) {
    res.insufficient = true;
    res.details = std::string("insufficient-sample: ") + e.what();
  }
  return res;
}

std::vector<FluctuationSample> assemble_fluctuations(
    const ExperimentConfig& cfg, const SimResult& sim) {
  const int n = cfg.policy.horizon;
  const int M = cfg.policy.maxGeneration;
  const auto& lags = cfg.policy.lags;
  std::vector<double> scale(lags.size());
  for (std::size_t k = 0; k < lags.size(); ++k)
    scale[k] = std::pow(kappa(cfg.law, cfg.theta, cfg.alpha),
                        -static_cast<double>(n - lags[k]) / cfg.alpha);
  const auto& wM = sim.theta_at(M);
  const auto& wA = sim.alpha_at(n);
  std::vector<const std::vector<double>*> wLag(lags.size());
  for (std::size_t k = 0; k < lags.size(); ++k)
    wLag[k] = &sim.theta_at(n - lags[k]);
  std::vector<FluctuationSample> out;
  out.reserve(sim.replicates());
  for (std::size_t rep = 0; rep < sim.replicates(); ++rep) {
    if (sim.capped[rep]) continue;
    FluctuationSample s;
    s.v.resize(lags.size());
    for (std::size_t k = 0; k < lags.size(); ++k)
      s.v[k] = scale[k] * (wM[rep] - (*wLag[k])[rep]);
    s.mixWeight = wA[rep];
    out.push_back(std::move(s));
  }
  return out;
}

CheckResult check_mixture_cf(const ExperimentConfig& cfg,
                             const SimResult& sim, const std::string& outDir) {
  CheckResult res;
  res.name = "mixture-cf";
  double c;
  try {
    c = tail_constant_w1(cfg.law, cfg.theta, cfg.alpha);
  } catch (const std::exception& e) {
    res.insufficient = true;
    res.details = std::string("no closed-form tail constant: ") + e.what();
    return res;
  }
  if (!(c > 0.0)) {
    res.insufficient = true;
    res.details = "tail constant is zero; mixture limit undefined";
    return res;
  }
  const double k = kappa(cfg.law, cfg.theta, cfg.alpha);
  const auto samples = assemble_fluctuations(cfg, sim);
  std::vector<double> lag0(samples.size()), weights(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    lag0[i] = samples[i].v[0];
    weights[i] = samples[i].mixWeight;
  }
  const auto grid = cfg.tgrid.make();
  const auto emp = ecf(lag0, grid);
  const StableSpec spec(cfg.alpha, c);
  std::vector<std::complex<double>> theo(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    theo[g] = mixture_cf(spec, k, weights, grid[g]);
  const CfVerdict v = cf_distance(emp, theo, grid, cfg.tolerances.cfSup);
  res.pass = v.pass;
  res.payload = json{{"supDistance", v.supDistance},
                     {"l2Distance", v.l2Distance},
                     {"tailConstant", c},
                     {"kappa", k}};
  std::ostringstream os;
  os << "sup |ECF - mixture CF| = " << v.supDistance << " (tol "
     << cfg.tolerances.cfSup << ")";
  res.details = os.str();
  if (!outDir.empty())
    write_ecf_table(outDir + "/ecf_mixture.csv", cfg.digest_hex(), grid, emp,
                    theo);
  return res;
}

CheckResult check_fdd(const ExperimentConfig& cfg, const SimResult& sim,
                      const std::string& outDir) {
  CheckResult res;
  res.name = "fdd";
  double c;
  try {
    c = tail_constant_w1(cfg.law, cfg.theta, cfg.alpha);
  } catch (const std::exception& e) {
    res.insufficient = true;
    res.details = std::string("no closed-form tail constant: ") + e.what();
    return res;
  }
  if (!(c > 0.0) || cfg.fddBetas.empty()) {
    res.insufficient = true;
    res.details = "fdd check needs a heavy tail and beta vectors";
    return res;
  }
  const double k = kappa(cfg.law, cfg.theta, cfg.alpha);
  const auto samples = assemble_fluctuations(cfg, sim);
  const auto grid = cfg.tgrid.make();
  const StableSpec spec(cfg.alpha, c);
  bool all = true;
  json list = json::array();
  for (std::size_t b = 0; b < cfg.fddBetas.size(); ++b) {
    const auto& betas = cfg.fddBetas[b];
    const CfVerdict v =
        fdd_check(samples, betas, spec, k, grid, cfg.tolerances.cfSup);
    all = all && v.pass;
    list.push_back(json{{"betas", betas},
                        {"supDistance", v.supDistance},
                        {"l2Distance", v.l2Distance},
                        {"pass", v.pass}});
    if (!outDir.empty()) {
      // regenerate the two sides for the artifact table
      std::vector<double> projected;
      std::vector<double> weights;
      projected.reserve(samples.size());
      weights.reserve(samples.size());
      for (const auto& s : samples) {
        double acc = 0.0;
        for (std::size_t j = 0; j < betas.size(); ++j)
          acc += betas[j] * s.v[j];
        projected.push_back(acc);
        weights.push_back(s.mixWeight);
      }
      const auto emp = ecf(projected, grid);
      std::vector<std::complex<double>> theo(grid.size());
      for (std::size_t g = 0; g < grid.size(); ++g)
        theo[g] = fdd_limit_cf(spec, k, betas, weights, grid[g]);
      write_ecf_table(outDir + "/ecf_fdd_" + std::to_string(b) + ".csv",
                      cfg.digest_hex(), grid, emp, theo);
    }
  }
  res.pass = all;
  res.payload = json{{"projections", std::move(list)}};
  res.details = "Cramer-Wold projections vs f.d.d. limit CF";
  return res;
}

CheckResult check_series_tail(const ExperimentConfig& cfg,
                              const SimResult& sim) {
  CheckResult res;
  res.name = "series-tail";
  const auto& a = cfg.seriesCoefficients;
  if (a.empty()) {
    res.insufficient = true;
    res.details = "no series coefficients configured";
    return res;
  }
  double c;
  try {
    c = tail_constant_w1(cfg.law, cfg.theta, cfg.alpha);
  } catch (const std::exception& e) {
    res.insufficient = true;
    res.details = std::string("no closed-form tail constant: ") + e.what();
    return res;
  }
  const double k = kappa(cfg.law, cfg.theta, cfg.alpha);
  std::vector<const std::vector<double>*> cols(a.size() + 1);
  for (std::size_t j = 0; j <= a.size(); ++j)
    cols[j] = &sim.theta_at(static_cast<int>(j));
  std::vector<double> series;
  series.reserve(sim.replicates());
  for (std::size_t rep = 0; rep < sim.replicates(); ++rep) {
    if (sim.capped[rep]) continue;
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
      acc += a[j] * ((*cols[j + 1])[rep] - (*cols[j])[rep]);
    series.push_back(acc);
  }
  const double predUp = predicted_series_tail_constant(a, k, cfg.alpha, c,
                                                       TailSide::Positive);
  const double predDown = predicted_series_tail_constant(a, k, cfg.alpha, c,
                                                         TailSide::Negative);
  try {
    const auto up =
        rank_tail_constant(series, cfg.alpha, 0.005, TailSide::Positive);
    const auto down =
        rank_tail_constant(series, cfg.alpha, 0.005, TailSide::Negative);
    const double tol = cfg.tolerances.seriesConstRel;
    const bool okUp = std::abs(up.constant - predUp) <= tol * predUp;
    const bool okDown = std::abs(down.constant - predDown) <= tol * predDown;
    res.pass = okUp && okDown;
    res.payload = json{{"upperEstimate", up.constant},
                       {"upperPredicted", predUp},
                       {"lowerEstimate", down.constant},
                       {"lowerPredicted", predDown},
                       {"k", up.k}};
    try {
      res.payload["upperDeepEstimate"] =
          rank_tail_constant(series, cfg.alpha, 0.0005, TailSide::Positive)
              .constant;
      res.payload["lowerDeepEstimate"] =
          rank_tail_constant(series, cfg.alpha, 0.0005, TailSide::Negative)
              .constant;
    } catch (const std::exception&) {
      // deep-tail diagnostic unavailable at this sample size
    }
    std::ostringstream os;
    os << "upper " << up.constant << " vs " << predUp << "; lower "
       << down.constant << " vs " << predDown;
    res.details = os.str();
  } catch (const std::invalid_argument& e) {
    res.insufficient = true;
    res.details = std::string("insufficient-sample: ") + e.what();
  }
  return res;
}

CheckResult check_calibration(const ExperimentConfig& cfg) {
  CheckResult res;
  res.name = "calibration";
  const double m = laplace_m(cfg.law, cfg.theta);
  const double k = kappa(cfg.law, cfg.theta, cfg.alpha);
  const double residual = std::abs(m - 1.0);
  res.pass = residual <= cfg.tolerances.calibrationResidual && k < 1.0;
  res.payload = json{{"mTheta", m}, {"residual", residual}, {"kappa", k}};
  std::ostringstream os;
  os << "|m(theta)-1| = " << residual << ", kappa = " << k;
  res.details = os.str();
  return res;
}

}  // namespace

void write_raw_csv(const SimResult& sim, const ExperimentConfig& cfg,
                   std::ostream& out) {
  out << "# digest=" << cfg.digest_hex() << " scenario=" << cfg.scenario
      << " version=" << kVersion << "\n";
  std::string header = "replicate";
  for (int g : sim.recordedGens) header += ",W_theta_" + std::to_string(g);
  for (int g : sim.recordedGens)
    header += ",W_alphatheta_" + std::to_string(g);
  header += ",extinctAt,capped,prunedMassBound\n";
  out << header;
  std::string row;
  for (std::size_t rep = 0; rep < sim.replicates(); ++rep) {
    row.clear();
    row += std::to_string(rep);
    for (std::size_t g = 0; g < sim.recordedGens.size(); ++g) {
      row += ',';
      append_double(row, sim.wTheta[g][rep]);
    }
    for (std::size_t g = 0; g < sim.recordedGens.size(); ++g) {
      row += ',';
      append_double(row, sim.wAlpha[g][rep]);
    }
    row += ',';
    row += std::to_string(sim.extinctAt[rep]);
    row += ',';
    row += std::to_string(static_cast<int>(sim.capped[rep]));
    row += ',';
    append_double(row, sim.prunedMass[rep]);
    row += '\n';
    out << row;
  }
}

SimResult load_raw_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# digest=", 0) != 0)
    throw std::runtime_error("raw csv: missing digest header");
  if (!std::getline(in, line))
    throw std::runtime_error("raw csv: missing column header");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  SimResult sim;
  std::size_t thetaCols = 0;
  for (const auto& c : cols)
    if (c.rfind("W_theta_", 0) == 0) {
      sim.recordedGens.push_back(std::stoi(c.substr(8)));
      ++thetaCols;
    }
  sim.wTheta.assign(thetaCols, {});
  sim.wAlpha.assign(thetaCols, {});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');  // replicate index
    for (std::size_t g = 0; g < thetaCols; ++g) {
      std::getline(ss, tok, ',');
      sim.wTheta[g].push_back(std::stod(tok));
    }
    for (std::size_t g = 0; g < thetaCols; ++g) {
      std::getline(ss, tok, ',');
      sim.wAlpha[g].push_back(std::stod(tok));
    }
    std::getline(ss, tok, ',');
    sim.extinctAt.push_back(std::stoi(tok));
    std::getline(ss, tok, ',');
    sim.capped.push_back(static_cast<std::uint8_t>(std::stoi(tok)));
    std::getline(ss, tok, ',');
    sim.prunedMass.push_back(std::stod(tok));
  }
  return sim;
}

bool RunReport::overall_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

json RunReport::to_json() const {
  json list = json::array();
  for (const auto& c : checks)
    list.push_back(json{{"name", c.name},
                        {"pass", c.pass},
                        {"insufficient", c.insufficient},
                        {"details", c.details},
                        {"payload", c.payload}});
  return json{{"scenario", scenario},
              {"configDigest", configDigest},
              {"checks", std::move(list)},
              {"replicates", replicates},
              {"extinct", extinct},
              {"capped", cappedCount},
              {"wallSeconds", wallSeconds},
              {"version", version}};
}

RunReport run_checks(const ExperimentConfig& cfg, const SimResult& sim,
                     const std::string& outDir) {
  RunReport report;
  report.scenario = cfg.scenario;
  report.configDigest = cfg.digest_hex();
  report.replicates = sim.replicates();
  for (auto e : sim.extinctAt)
    if (e >= 0) ++report.extinct;
  for (auto c : sim.capped)
    if (c) ++report.cappedCount;

  for (const auto& name : cfg.checks) {
    if (name == "martingale")
      report.checks.push_back(check_martingale(cfg, sim));
    else if (name == "hill-w1")
      report.checks.push_back(check_hill(cfg, sim, 1, "hill-w1"));
    else if (name == "hill-wm")
      report.checks.push_back(
          check_hill(cfg, sim, cfg.policy.maxGeneration, "hill-wm"));
    else if (name == "tail-ratio")
      report.checks.push_back(check_tail_ratio(cfg, sim));
    else if (name == "mixture-cf")
      report.checks.push_back(check_mixture_cf(cfg, sim, outDir));
    else if (name == "fdd")
      report.checks.push_back(check_fdd(cfg, sim, outDir));
    else if (name == "series-tail")
      report.checks.push_back(check_series_tail(cfg, sim));
    else if (name == "calibration")
      report.checks.push_back(check_calibration(cfg));
    else
      throw ConfigError("unknown check '" + name + "'");
  }
  return report;
}

RunReport run_scenario(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const LawReport law = check_conditions(cfg.law, cfg.theta, cfg.alpha);
  if (!law.all_ok() && !opts.overrideConditions) {
    std::string bad;
    for (const auto& [label, ok] : law.conditions)
      if (!ok) bad += (bad.empty() ? "" : ", ") + label;
    throw ConfigError("admissibility conditions failed: " + bad +
                      " (use --override-conditions to force)");
  }
  if (!opts.outDir.empty()) fs::create_directories(opts.outDir);

  const auto t0 = std::chrono::steady_clock::now();
  const SimResult sim = simulate_replicates(cfg, opts.threads);
  RunReport report = run_checks(cfg, sim, opts.outDir);
  report.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (!opts.outDir.empty()) {
    if (opts.writeRawCsv) {
      std::ofstream raw(opts.outDir + "/raw.csv");
      write_raw_csv(sim, cfg, raw);
    }
    std::ofstream rep(opts.outDir + "/report.json");
    rep << report.to_json().dump(2) << "\n";
  }
  return report;
}

void export_cf_tables(const ExperimentConfig& cfg,
                      const std::vector<double>& mixWeights,
                      const std::string& dir) {
  fs::create_directories(dir);
  const auto grid = cfg.tgrid.make();
  double c = 1.0;
  try {
    c = tail_constant_w1(cfg.law, cfg.theta, cfg.alpha);
  } catch (const std::exception&) {
    // keep unit constant for laws without a closed form
  }
  if (!(c > 0.0)) c = 1.0;
  const double k = kappa(cfg.law, cfg.theta, cfg.alpha);
  const StableSpec spec(cfg.alpha, c);
  const ARSpec ar(std::pow(k, 1.0 / cfg.alpha), spec);
  const std::vector<double> unitWeight{1.0};
  const auto& w = mixWeights.empty() ? unitWeight : mixWeights;

  auto writeTable = [&](const std::string& name, auto&& f) {
    std::ofstream out(dir + "/" + name);
    out << "# digest=" << cfg.digest_hex() << "\n";
    out << "t,re,im\n";
    char buf[140];
    for (double t : grid) {
      const std::complex<double> v = f(t);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, v.real(),
                    v.imag());
      out << buf;
    }
  };
  writeTable("cf_q.csv", [&](double t) { return cf_Q(spec, t); });
  writeTable("cf_u0.csv", [&](double t) { return cf_U0(ar, t); });
  writeTable("cf_mixture.csv",
             [&](double t) { return mixture_cf(spec, k, w, t); });
}

}  // namespace brw
