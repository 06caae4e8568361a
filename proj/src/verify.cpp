#include "brw/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace brw {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Empirical survival fraction P(X > x) from an ascending-sorted sample.
double survival_sorted(const std::vector<double>& sorted, double x) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(sorted.end() - it) /
         static_cast<double>(sorted.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + lo);
  }
  return m;
}

bool rel_ok(double est, double pred, double tol) {
  if (pred == 0.0) return std::abs(est) <= tol;
  return std::abs(est - pred) <= tol * std::abs(pred);
}

}  // namespace

TailVerdict make_tail_verdict(double estIndex, double predIndex,
                              double estConstant, double predConstant,
                              double indexTolAbs, double constantTolRel) {
  TailVerdict v;
  v.estimatedIndex = estIndex;
  v.predictedIndex = predIndex;
  v.estimatedConstant = estConstant;
  v.predictedConstant = predConstant;
  bool ok = true;
  if (!std::isnan(estIndex) && !std::isnan(predIndex))
    ok = ok && std::abs(estIndex - predIndex) <= indexTolAbs;
  if (!std::isnan(estConstant) && !std::isnan(predConstant))
    ok = ok && rel_ok(estConstant, predConstant, constantTolRel);
  v.pass = ok;
  return v;
}

HillEstimate hill_estimator(std::span<const double> samples,
                            double topFraction) {
  if (samples.empty()) throw std::invalid_argument("hill: empty sample");
  if (!(topFraction > 0.0 && topFraction <= 0.2))
    throw std::invalid_argument("hill: topFraction in (0, 0.2] required");
  std::vector<double> pos;
  pos.reserve(samples.size());
  for (double x : samples)
    if (x > 0.0) pos.push_back(x);
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(topFraction * static_cast<double>(samples.size())));
  if (k < 30 || pos.size() < k + 1)
    throw std::invalid_argument("hill: too few positive samples");
  std::nth_element(pos.begin(), pos.begin() + k, pos.end(),
                   std::greater<double>());
  // fixed summation order keeps the estimate permutation-invariant
  std::sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k),
            std::greater<double>());
  const double ref = pos[k];  // (k+1)-th largest
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(pos[i] / ref);
  if (acc <= 0.0)
    throw std::invalid_argument("hill: degenerate order statistics");
  HillEstimate est;
  est.k = k;
  est.index = static_cast<double>(k) / acc;
  est.stderr_ = est.index / std::sqrt(static_cast<double>(k));
  return est;
}

TailVerdict tail_ratio_check(std::span<const double> samplesW,
                             std::span<const double> samplesW1, double kappa,
                             std::pair<double, double> xQuantiles,
                             double toleranceRel) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("tail_ratio: kappa in (0,1) required");
  std::vector<double> w(samplesW.begin(), samplesW.end());
  std::vector<double> w1(samplesW1.begin(), samplesW1.end());
  std::sort(w.begin(), w.end());
  std::sort(w1.begin(), w1.end());

  const double xlo = quantile_sorted(w1, xQuantiles.first);
  const double xhi = quantile_sorted(w1, xQuantiles.second);
  if (!(xlo > 0.0) || !(xhi > xlo))
    throw std::runtime_error("tail_ratio: empty or degenerate x-window");

  constexpr int kGridPoints = 21;
  std::vector<double> ratios;
  ratios.reserve(kGridPoints);
  const double lf = std::log(xlo), hf = std::log(xhi);
  for (int i = 0; i < kGridPoints; ++i) {
    const double x = std::exp(lf + (hf - lf) * i / (kGridPoints - 1));
    const double s1 = survival_sorted(w1, x);
    if (s1 <= 0.0) continue;
    ratios.push_back(survival_sorted(w, x) / s1);
  }
  if (ratios.empty()) throw std::runtime_error("tail_ratio: empty window");

  const double predicted = 1.0 / (1.0 - kappa);
  const double est = median_of(ratios);
  TailVerdict v = make_tail_verdict(
      std::numeric_limits<double>::quiet_NaN(),
      std::numeric_limits<double>::quiet_NaN(), est, predicted,
      0.0, toleranceRel);
  v.windowLo = xlo;
  v.windowHi = xhi;
  std::ostringstream os;
  os << "median survival ratio over [" << xlo << ", " << xhi << "] vs (1-kappa)^-1";
  if (predicted >= 999.0)
    os << "; unstable: ratio near 1000 needs prohibitive sample size";
  v.details = os.str();
  return v;
}

double predicted_series_tail_constant(std::span<const double> a, double kappa,
                                      double alpha, double c, TailSide side,
                                      bool eventuallyConstant) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("series constant: kappa in (0,1) required");
  const double sign = side == TailSide::Positive ? 1.0 : -1.0;
  double acc = 0.0, kj = 1.0;
  for (double aj : a) {
    const double part = std::max(sign * aj, 0.0);
    acc += kj * std::pow(part, alpha);
    kj *= kappa;
  }
  if (eventuallyConstant && !a.empty()) {
    const double part = std::max(sign * a.back(), 0.0);
    acc += std::pow(part, alpha) * kj / (1.0 - kappa);
  }
  return c * acc;
}

TailConstantEstimate rank_tail_constant(std::span<const double> samples,
                                        double alpha, double topFraction,
                                        TailSide side) {
  const double sign = side == TailSide::Positive ? 1.0 : -1.0;
  std::vector<double> v;
  v.reserve(samples.size());
  for (double x : samples)
    if (sign * x > 0.0) v.push_back(sign * x);
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(topFraction * static_cast<double>(samples.size())));
  if (k < 30 || v.size() < k)
    throw std::invalid_argument("rank_tail_constant: too few tail samples");
  std::nth_element(v.begin(), v.begin() + k, v.end(), std::greater<double>());
  std::sort(v.begin(), v.begin() + k, std::greater<double>());
  std::vector<double> est(k);
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < k; ++i)
    est[i] = (static_cast<double>(i + 1) / n) * std::pow(v[i], alpha);
  return {median_of(est), k};
}

std::vector<std::complex<double>> ecf(std::span<const double> samples,
                                      std::span<const double> grid) {
  if (samples.empty()) throw std::invalid_argument("ecf: empty sample");
  // summing in sorted order makes the result permutation-invariant
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  std::vector<std::complex<double>> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    double re = 0.0, im = 0.0;
    for (double x : xs) {
      re += std::cos(t * x);
      im += std::sin(t * x);
    }
    out[g] = std::complex<double>(re, im) / static_cast<double>(xs.size());
  }
  return out;
}

CfVerdict cf_distance(std::span<const std::complex<double>> empirical,
                      std::span<const std::complex<double>> theoretical,
                      std::span<const double> grid, double tolerance) {
  if (empirical.size() != theoretical.size() || empirical.size() != grid.size())
    throw std::invalid_argument("cf_distance: length mismatch");
  CfVerdict v;
  v.grid.assign(grid.begin(), grid.end());
  double sup = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < empirical.size(); ++i) {
    const double d = std::abs(empirical[i] - theoretical[i]);
    sup = std::max(sup, d);
    sq += d * d;
  }
  v.supDistance = sup;
  v.l2Distance = std::sqrt(sq / static_cast<double>(empirical.size()));
  v.pass = sup <= tolerance;
  return v;
}

CfVerdict fdd_check(const std::vector<FluctuationSample>& samples,
                    std::span<const double> betas, const StableSpec& spec,
                    double kappa, std::span<const double> grid,
                    double tolerance) {
  if (samples.empty()) throw std::invalid_argument("fdd_check: no samples");
  std::vector<double> projected(samples.size());
  std::vector<double> weights(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].v.size() != betas.size())
      throw std::invalid_argument("fdd_check: dimension mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < betas.size(); ++j)
      acc += betas[j] * samples[i].v[j];
    projected[i] = acc;
    weights[i] = samples[i].mixWeight;
  }
  const auto empirical = ecf(projected, grid);
  std::vector<std::complex<double>> theoretical(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    theoretical[g] = fdd_limit_cf(spec, kappa, betas, weights, grid[g]);
  return cf_distance(empirical, theoretical, grid, tolerance);
}

std::vector<double> default_cf_grid() {
  std::vector<double> grid(81);
  for (int i = 0; i < 81; ++i) grid[i] = -5.0 + 0.125 * i;
  return grid;
}

}  // namespace brw
