#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brw/engine.hpp"
#include "brw/stable.hpp"

namespace brw {

struct TailVerdict {
  double estimatedIndex = std::numeric_limits<double>::quiet_NaN();
  double predictedIndex = std::numeric_limits<double>::quiet_NaN();
  double estimatedConstant = std::numeric_limits<double>::quiet_NaN();
  double predictedConstant = std::numeric_limits<double>::quiet_NaN();
  double windowLo = 0.0, windowHi = 0.0;
  bool pass = false;
  std::string details;
};

// pass <=> both relative errors are within tolerance; a NaN pair on either
// side means that comparison is not part of the verdict.
TailVerdict make_tail_verdict(double estIndex, double predIndex,
                              double estConstant, double predConstant,
                              double indexTolAbs, double constantTolRel);

struct CfVerdict {
  double supDistance = 0.0;
  double l2Distance = 0.0;
  std::vector<double> grid;
  bool pass = false;
};

struct HillEstimate {
  double index = 0.0;
  double stderr_ = 0.0;
  std::size_t k = 0;  // order statistics used
};

// Hill estimator over the ceil(topFraction * n) largest positive samples.
// Throws when fewer than 30 usable order statistics exist or the top block
// is degenerate (all equal).
HillEstimate hill_estimator(std::span<const double> samples,
                            double topFraction);

// Ratio of empirical survival functions S_W / S_W1 over an x-window set by
// quantiles of samplesW1 (default [0.99, 0.999]); the window median is
// compared against (1-kappa)^{-1}.
TailVerdict tail_ratio_check(std::span<const double> samplesW,
                             std::span<const double> samplesW1, double kappa,
                             std::pair<double, double> xQuantiles = {0.99,
                                                                     0.999},
                             double toleranceRel = 0.15);

enum class TailSide { Positive, Negative };

// c * sum_j kappa^j (a_j^+-)^alpha, with the geometric tail beyond len(a)
// added in closed form when the sequence is flagged eventually constant.
double predicted_series_tail_constant(std::span<const double> a, double kappa,
                                      double alpha, double c, TailSide side,
                                      bool eventuallyConstant = false);

// Rank-plot estimate of the tail constant: median over the top fraction of
// (rank/n) * x_(rank)^alpha, applied to the chosen side.
struct TailConstantEstimate {
  double constant = 0.0;
  std::size_t k = 0;
};
TailConstantEstimate rank_tail_constant(std::span<const double> samples,
                                        double alpha, double topFraction,
                                        TailSide side);

// Empirical characteristic function per grid point.
std::vector<std::complex<double>> ecf(std::span<const double> samples,
                                      std::span<const double> grid);

CfVerdict cf_distance(std::span<const std::complex<double>> empirical,
                      std::span<const std::complex<double>> theoretical,
                      std::span<const double> grid, double tolerance = 0.05);

// Cramer-Wold projection check of the finite-dimensional limit: projects
// each sample vector by betas, builds the ECF, and compares against
// fdd_limit_cf over the paired mixing weights.
CfVerdict fdd_check(const std::vector<FluctuationSample>& samples,
                    std::span<const double> betas, const StableSpec& spec,
                    double kappa, std::span<const double> grid,
                    double tolerance = 0.05);

// 81 equispaced points on [-5, 5].
std::vector<double> default_cf_grid();

}  // namespace brw
