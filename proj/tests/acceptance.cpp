// Acceptance suite: one line per criterion, exit 0 iff all pass.
//
// The default ("desk") scale keeps every tolerance unchanged but reduces
// tree depths and replicate budgets so the suite terminates on a single
// desktop core; --full runs the original experiment sizes (the gw fixture
// at M=30 with 1e6 replicates costs ~2^31 particle-events per replicate,
// i.e. weeks of CPU; see README).

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brw/runner.hpp"
#include "brw/scenarios.hpp"
#include "brw/stable.hpp"
#include "brw/verify.hpp"

using namespace brw;

namespace {

struct Options {
  bool full = false;
  int threads = 0;
  std::string outDir = "acceptance_out";
  std::optional<int> only;
};

struct Line {
  int id;
  bool pass;
  std::string text;
};

std::vector<Line> gLines;

void report(int id, bool pass, const std::string& text) {
  gLines.push_back({id, pass, text});
  std::cout << "[C" << id << "][" << (pass ? "PASS" : "FAIL") << "] " << text
            << std::endl;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

const CheckResult& find_check(const RunReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("check missing from report: " + name);
}

// ---------------------------------------------------------------------------
// Scenario runs shared between criteria (simulated lazily, once each).
// ---------------------------------------------------------------------------

struct Runs {
  Options opts;

  std::optional<RunReport> tails;       // gw-heyde: tail ratio, Hill, martingale
  std::optional<RunReport> fluct;       // gw-heyde: mixture CF + fdd
  std::optional<RunReport> fluctSmall;  // smaller (n, M) for the shrink check
  std::optional<RunReport> series;      // series-alternating + martingale
  std::optional<RunReport> paretoNormal;
  std::optional<RunReport> infinitePoints;

  ExperimentConfig tails_config() const {
    ExperimentConfig c = find_scenario("gw-heyde").config;
    c.checks = {"martingale", "hill-w1", "hill-wm", "tail-ratio"};
    c.fddBetas.clear();
    c.policy.lags = {0};
    if (!opts.full) {
      c.policy.maxGeneration = 13;  // kappa^13 biases the ratio by ~1.1%
      c.policy.horizon = 12;
    }
    return c;
  }

  ExperimentConfig fluct_config(bool small) const {
    ExperimentConfig c = find_scenario("gw-heyde").config;
    c.checks = {"mixture-cf", "fdd"};
    c.seed = 31415;
    if (opts.full) {
      if (small) {
        // the stated experiment point; the big run is (16, 40)
        c.policy.horizon = 12;
        c.policy.maxGeneration = 30;
      } else {
        c.policy.horizon = 16;
        c.policy.maxGeneration = 40;
      }
      return c;
    }
    c.replicates = 16000;
    if (small) {
      c.policy.horizon = 6;
      c.policy.maxGeneration = 16;
      c.checks = {"mixture-cf"};
    } else {
      c.policy.horizon = 10;
      c.policy.maxGeneration = 22;
    }
    return c;
  }

  ExperimentConfig series_config() const {
    ExperimentConfig c = find_scenario("series-alternating").config;
    if (!opts.full) {
      c.policy.maxGeneration = 14;
      c.policy.horizon = 13;
      c.seriesCoefficients.resize(14);
      for (std::size_t j = 0; j < c.seriesCoefficients.size(); ++j)
        c.seriesCoefficients[j] = (j % 2 == 0) ? 1.0 : -1.0;
      c.replicates = 250000;
    } else {
      c.replicates = 1000000;
    }
    return c;
  }

  ExperimentConfig pareto_normal_config() const {
    ExperimentConfig c = find_scenario("pareto-normal").config;
    if (!opts.full) {
      c.policy.maxGeneration = 12;
      c.policy.horizon = 6;
      c.replicates = 50000;
    }
    return c;
  }

  ExperimentConfig infinite_points_config() const {
    ExperimentConfig c = find_scenario("infinite-points").config;
    if (!opts.full) {
      c.policy.maxGeneration = 11;
      c.policy.horizon = 10;
      c.replicates = 20000;
    } else {
      c.replicates = 100000;
    }
    return c;
  }

  const RunReport& get(std::optional<RunReport>& slot,
                       const ExperimentConfig& cfg, const std::string& tag) {
    if (!slot) {
      std::cout << "  ... running " << tag << " (" << cfg.replicates
                << " replicates, M=" << cfg.policy.maxGeneration
                << ", n=" << cfg.policy.horizon << ")" << std::endl;
      RunOptions ro;
      ro.threads = opts.threads;
      ro.outDir = opts.outDir + "/" + tag;
      slot = run_scenario(cfg, ro);
      std::cout << "  ... " << tag << " done in " << fmt(slot->wallSeconds, 3)
                << "s" << std::endl;
    }
    return *slot;
  }
};

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

void criterion1_tail_ratio(Runs& runs) {
  const auto cfg = runs.tails_config();
  const auto& rep = runs.get(runs.tails, cfg, "tails");
  const auto& check = find_check(rep, "tail-ratio");
  const double est = check.payload.value("estimated", 0.0);
  const double pred = check.payload.value("predicted", 0.0);
  std::ostringstream os;
  os << "tail-ratio gw-heyde: median " << fmt(est) << " vs (1-kappa)^-1 = "
     << fmt(pred) << " (tol 15%), window ["
     << fmt(check.payload.value("windowLo", 0.0)) << ", "
     << fmt(check.payload.value("windowHi", 0.0)) << "], " << rep.replicates
     << " replicates, M=" << cfg.policy.maxGeneration << ", wall "
     << fmt(rep.wallSeconds, 3) << "s";
  if (check.payload.contains("deepEstimate"))
    os << "; one decade deeper the median reaches "
       << fmt(check.payload["deepEstimate"].get<double>())
       << " (pre-asymptotic window, see notes)";
  report(1, check.pass && !check.insufficient, os.str());
}

void criterion2_hill(Runs& runs) {
  const auto cfg = runs.tails_config();
  const auto& rep = runs.get(runs.tails, cfg, "tails");
  const auto& h1 = find_check(rep, "hill-w1");
  const auto& hm = find_check(rep, "hill-wm");
  const double i1 = h1.payload.value("index", 0.0);
  const double im = hm.payload.value("index", 0.0);
  std::ostringstream os;
  os << "Hill indices: W_1 " << fmt(i1) << ", W_M " << fmt(im)
     << " vs alpha=1.5 (tol 0.1), top 1% of " << rep.replicates << " samples";
  if (hm.payload.contains("indexTop0p1"))
    os << "; W_M at top 0.1%: " << fmt(hm.payload["indexTop0p1"].get<double>())
       << " (slope still steepening toward alpha)";
  report(2, h1.pass && hm.pass && !h1.insufficient && !hm.insufficient,
         os.str());
}

void criterion3_mixture(Runs& runs) {
  const auto big = runs.fluct_config(false);
  const auto small = runs.fluct_config(true);
  const auto& repBig = runs.get(runs.fluct, big, "fluct");
  const auto& repSmall = runs.get(runs.fluctSmall, small, "fluct-small");
  const double dBig =
      find_check(repBig, "mixture-cf").payload.value("supDistance", 1.0);
  const double dSmall =
      find_check(repSmall, "mixture-cf").payload.value("supDistance", 1.0);
  // in full mode the "small" run is the stated (12, 30) experiment and the
  // big one the (16, 40) comparison point
  const double dStated = runs.opts.full ? dSmall : dBig;
  const bool passTol = dStated <= big.tolerances.cfSup;
  const bool shrank = dBig < dSmall;
  const auto& stated = runs.opts.full ? small : big;
  std::ostringstream os;
  os << "mixture CF: sup distance " << fmt(dStated) << " <= 0.05 at (n="
     << stated.policy.horizon << ", M=" << stated.policy.maxGeneration
     << "); shrink check: " << fmt(dSmall) << " -> " << fmt(dBig)
     << " as (n, M) grow from (" << small.policy.horizon << ", "
     << small.policy.maxGeneration << ") to (" << big.policy.horizon << ", "
     << big.policy.maxGeneration << ")";
  report(3, passTol && shrank, os.str());
}

void criterion4_fdd(Runs& runs) {
  const auto cfg = runs.fluct_config(false);
  const auto& rep = runs.get(runs.fluct, cfg, "fluct");
  const auto& check = find_check(rep, "fdd");
  std::ostringstream os;
  os << "f.d.d. lags (0,1,2): ";
  bool first = true;
  for (const auto& p : check.payload.at("projections")) {
    if (!first) os << ", ";
    first = false;
    os << "betas (";
    bool f2 = true;
    for (double b : p.at("betas").get<std::vector<double>>()) {
      if (!f2) os << ",";
      f2 = false;
      os << b;
    }
    os << ") sup " << fmt(p.at("supDistance").get<double>());
  }
  os << " (tol 0.05)";
  report(4, check.pass && !check.insufficient, os.str());
}

void criterion5_series(Runs& runs) {
  const auto cfg = runs.series_config();
  const auto& rep = runs.get(runs.series, cfg, "series");
  const auto& check = find_check(rep, "series-tail");
  const double upEst = check.payload.value("upperEstimate", 0.0);
  const double downEst = check.payload.value("lowerEstimate", 0.0);
  // closed forms for a_j = (-1)^j
  const double c = tail_constant_w1(cfg.law, cfg.theta, cfg.alpha);
  const double k = kappa(cfg.law, cfg.theta, cfg.alpha);
  const double upClosed = c / (1.0 - k * k);
  const double downClosed = c * k / (1.0 - k * k);
  const bool closedOk = std::abs(upEst - upClosed) <= 0.20 * upClosed &&
                        std::abs(downEst - downClosed) <= 0.20 * downClosed;
  std::ostringstream os;
  os << "series tail constants: upper " << fmt(upEst) << " vs c/(1-k^2)="
     << fmt(upClosed) << ", lower " << fmt(downEst) << " vs c*k/(1-k^2)="
     << fmt(downClosed) << " (tol 20%, top 0.5% of " << rep.replicates << ")";
  if (check.payload.contains("lowerDeepEstimate"))
    os << "; at top 0.05%: upper "
       << fmt(check.payload["upperDeepEstimate"].get<double>()) << ", lower "
       << fmt(check.payload["lowerDeepEstimate"].get<double>());
  report(5, check.pass && closedOk && !check.insufficient, os.str());
}

void criterion6_stable_oracles(const Options& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const StableSpec spec(1.5, 1.0);
  const ARSpec ar(0.8, spec);
  std::vector<double> grid;
  for (double t = 0.1; t <= 5.0 + 1e-9; t += 0.1) grid.push_back(t);

  // sampler fidelity at 1e6 draws
  StreamRng rng(424243);
  std::vector<double> qs(1000000);
  for (auto& x : qs) x = sample_Q(spec, rng);
  const auto empQ = ecf(qs, grid);
  double supQ = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    supQ = std::max(supQ, std::abs(empQ[i] - cf_Q(spec, grid[i])));

  // product identity at J=200, alpha=1.5, phi=0.8
  std::complex<double> prod{1.0, 0.0};
  double phij = 1.0;
  for (int j = 0; j <= 200; ++j) {
    prod *= cf_Q(spec, phij);
    phij *= ar.phi;
  }
  const double prodErr = std::abs(cf_U0(ar, 1.0) - prod);

  // AR stationarity: ECF of U_5
  const int nPaths = opts.full ? 1000000 : 400000;
  std::vector<double> u5(static_cast<std::size_t>(nPaths));
  for (auto& x : u5) x = sample_U_path(ar, 6, rng)[5];
  const auto empU = ecf(u5, grid);
  double supU = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    supU = std::max(supU, std::abs(empU[i] - cf_U0(ar, grid[i])));

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const bool pass =
      supQ < 0.01 && prodErr < 1e-10 && supU < 0.01 && wall <= 60.0;
  std::ostringstream os;
  os << "stable oracles: sampler ECF sup " << fmt(supQ)
     << " < 0.01, product error " << fmt(prodErr, 3)
     << " < 1e-10 at J=200, U_5 ECF sup " << fmt(supU) << " < 0.01, wall "
     << fmt(wall, 3) << "s <= 60s";
  report(6, pass, os.str());
}

void criterion7_martingale(Runs& runs) {
  struct Item {
    const char* tag;
    const RunReport* rep;
  };
  const auto& tails = runs.get(runs.tails, runs.tails_config(), "tails");
  const auto& series = runs.get(runs.series, runs.series_config(), "series");
  const auto& pn =
      runs.get(runs.paretoNormal, runs.pareto_normal_config(), "pareto-normal");
  const auto& ip = runs.get(runs.infinitePoints, runs.infinite_points_config(),
                            "infinite-points");
  const std::vector<Item> items{{"gw-heyde", &tails},
                                {"series-alternating", &series},
                                {"pareto-normal", &pn},
                                {"infinite-points", &ip}};
  bool all = true;
  std::ostringstream os;
  os << "martingale means within 5 SE: ";
  bool first = true;
  for (const auto& it : items) {
    const auto& check = find_check(*it.rep, "martingale");
    all = all && check.pass && !check.insufficient;
    if (!first) os << ", ";
    first = false;
    os << it.tag << " worst|z| " << fmt(check.payload.value("worstZ", 0.0), 3);
  }
  report(7, all, os.str());
}

void criterion8_calibration(Runs& runs) {
  const auto cfg = runs.infinite_points_config();
  const auto& rep = runs.get(runs.infinitePoints, cfg, "infinite-points");
  const auto& check = find_check(rep, "calibration");
  std::ostringstream os;
  os << "calibration: |m(theta)-1| = "
     << fmt(check.payload.value("residual", 1.0), 3)
     << " <= 1e-10, kappa = " << fmt(check.payload.value("kappa", 1.0))
     << " < 1 at theta=" << fmt(cfg.theta, 6) << ", a=" << fmt(cfg.law.a, 3);
  report(8, check.pass, os.str());
}

void criterion9_determinism(Runs& runs) {
  ExperimentConfig cfg = runs.tails_config();
  cfg.replicates = runs.opts.full ? 20000 : 2000;
  cfg.checks = {};
  std::vector<std::string> outputs;
  for (int threads : {1, 4, 16}) {
    const auto sim = simulate_replicates(cfg, threads);
    std::ostringstream os;
    write_raw_csv(sim, cfg, os);
    outputs.push_back(os.str());
  }
  const bool pass = outputs[0] == outputs[1] && outputs[0] == outputs[2] &&
                    !outputs[0].empty();
  std::ostringstream os;
  os << "determinism: raw CSV byte-identical across thread counts {1,4,16} ("
     << cfg.replicates << " replicates, " << outputs[0].size() << " bytes)";
  report(9, pass, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  Options opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full") == 0) {
      opts.full = true;
    } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      opts.threads = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      opts.outDir = argv[++i];
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      opts.only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--full] [--threads N] [--out DIR] "
                   "[--only K]\n";
      return 2;
    }
  }

  std::cout << "acceptance suite (" << (opts.full ? "full" : "desk-scale")
            << " budgets; tolerances as specified)" << std::endl;
  if (!opts.full)
    std::cout << "  desk scale shrinks tree depth and replicate budgets to "
                 "fit one desktop core; run with --full for the original "
                 "experiment sizes"
              << std::endl;

  Runs runs;
  runs.opts = opts;

  auto want = [&](int id) { return !opts.only || *opts.only == id; };
  try {
    if (want(1)) criterion1_tail_ratio(runs);
    if (want(2)) criterion2_hill(runs);
    if (want(3)) criterion3_mixture(runs);
    if (want(4)) criterion4_fdd(runs);
    if (want(5)) criterion5_series(runs);
    if (want(6)) criterion6_stable_oracles(opts);
    if (want(7)) criterion7_martingale(runs);
    if (want(8)) criterion8_calibration(runs);
    if (want(9)) criterion9_determinism(runs);
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }

  int failed = 0;
  for (const auto& l : gLines) failed += l.pass ? 0 : 1;
  std::cout << (failed == 0 ? "ALL CRITERIA PASSED"
                            : std::to_string(failed) + " CRITERIA FAILED")
            << " (" << gLines.size() << " evaluated)" << std::endl;
  return failed == 0 ? 0 : 1;
}
