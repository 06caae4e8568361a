#include "brw/laws.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace brw {

namespace {

constexpr double kTiny = 1e-18;

// Hurwitz-style partial sum: sum_{n >= n0} n^{-alpha} via direct terms plus
// an Euler-Maclaurin tail, accurate to ~1e-14 for alpha > 1.
double power_tail_sum(double alpha, long n0) {
  if (n0 < 1) throw std::invalid_argument("power_tail_sum: n0 >= 1 required");
  const long direct = 20000;
  double s = 0.0;
  long n = n0;
  for (; n < n0 + direct; ++n) s += std::pow(static_cast<double>(n), -alpha);
  const double N = static_cast<double>(n);
  // int_N^inf x^-a dx + f(N)/2 - a*N^{-a-1}/12
  s += std::pow(N, 1.0 - alpha) / (alpha - 1.0) + 0.5 * std::pow(N, -alpha) -
       alpha / 12.0 * std::pow(N, -alpha - 1.0);
  return s;
}

}  // namespace

// ----------------------------------------------------------------------------
// DisplacementLaw
// ----------------------------------------------------------------------------

DisplacementLaw DisplacementLaw::normal(double mean, double variance) {
  if (variance < 0.0)
    throw std::invalid_argument("Normal displacement: variance >= 0 required");
  return {Kind::Normal, mean, variance};
}

DisplacementLaw DisplacementLaw::exponential(double rate) {
  if (rate <= 0.0)
    throw std::invalid_argument("Exponential displacement: rate > 0 required");
  return {Kind::Exponential, rate, 0.0};
}

DisplacementLaw DisplacementLaw::point_mass(double location) {
  return {Kind::PointMass, location, 0.0};
}

DisplacementLaw DisplacementLaw::uniform(double lo, double hi) {
  if (!(lo < hi))
    throw std::invalid_argument("Uniform displacement: lo < hi required");
  return {Kind::Uniform, lo, hi};
}

double DisplacementLaw::laplace(double theta) const {
  switch (kind) {
    case Kind::Normal:
      return std::exp(-theta * p1 + 0.5 * theta * theta * p2);
    case Kind::Exponential:
      if (theta <= -p1) return kInfiniteTransform;
      return p1 / (p1 + theta);
    case Kind::PointMass:
      return std::exp(-theta * p1);
    case Kind::Uniform: {
      if (theta == 0.0) return 1.0;
      return (std::exp(-theta * p1) - std::exp(-theta * p2)) /
             (theta * (p2 - p1));
    }
  }
  return kInfiniteTransform;
}

bool DisplacementLaw::laplace_finite(double theta) const {
  return std::isfinite(laplace(theta));
}

double DisplacementLaw::sample(StreamRng& rng) const {
  switch (kind) {
    case Kind::Normal:
      return rng.next_normal(p1, std::sqrt(p2));
    case Kind::Exponential:
      return rng.next_exponential() / p1;
    case Kind::PointMass:
      return p1;
    case Kind::Uniform:
      return p1 + (p2 - p1) * rng.next_unit();
  }
  return 0.0;
}

bool DisplacementLaw::is_positive() const {
  switch (kind) {
    case Kind::Exponential:
      return true;
    case Kind::PointMass:
      return p1 > 0.0;
    case Kind::Uniform:
      return p1 >= 0.0 && p2 > 0.0;
    case Kind::Normal:
      return false;
  }
  return false;
}

std::string DisplacementLaw::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Normal: os << "Normal(" << p1 << "," << p2 << ")"; break;
    case Kind::Exponential: os << "Exponential(" << p1 << ")"; break;
    case Kind::PointMass: os << "PointMass(" << p1 << ")"; break;
    case Kind::Uniform: os << "Uniform(" << p1 << "," << p2 << ")"; break;
  }
  return os.str();
}

// ----------------------------------------------------------------------------
// CountLaw
// ----------------------------------------------------------------------------

CountLaw CountLaw::deterministic(int n) {
  if (n < 0) throw std::invalid_argument("CountLaw: n >= 0 required");
  CountLaw c;
  c.kind_ = Kind::Deterministic;
  c.fixed_ = n;
  c.mean_ = n;
  return c;
}

CountLaw CountLaw::table(std::vector<double> probs) {
  if (probs.empty()) throw std::invalid_argument("CountLaw: empty table");
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0)
      throw std::invalid_argument("CountLaw: negative probability");
    total += probs[i];
    mean += static_cast<double>(i) * probs[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("CountLaw: table must sum to 1");
  CountLaw c;
  c.kind_ = Kind::Table;
  c.probs_ = std::move(probs);
  c.mean_ = mean / total;
  c.body_ = AliasTable(c.probs_);
  return c;
}

CountLaw CountLaw::pareto_tail(double alpha, double d, int minCount) {
  if (alpha <= 1.0)
    throw std::invalid_argument("CountLaw: tail index > 1 required");
  if (d < 0.0) throw std::invalid_argument("CountLaw: d >= 0 required");
  if (minCount < 0) throw std::invalid_argument("CountLaw: minCount >= 0");
  if (d == 0.0) return deterministic(minCount);
  CountLaw c;
  c.kind_ = Kind::ParetoTail;
  c.alpha_ = alpha;
  c.d_ = d;
  c.minCount_ = minCount;

  auto survival = [&](long n) {  // P(N >= n)
    if (n <= minCount) return 1.0;
    return std::min(1.0, d * std::pow(static_cast<double>(n), -alpha));
  };

  // mean = sum_{n >= 1} P(N >= n). Survival equals 1 up to
  // clip = max(minCount, floor(d^{1/alpha})) and d n^-alpha beyond.
  const long clip = std::max<long>(
      minCount, static_cast<long>(std::floor(std::pow(d, 1.0 / alpha))));
  c.mean_ = static_cast<double>(clip) + d * power_tail_sum(alpha, clip + 1);

  // body small enough to keep the alias table L1-resident
  const int bodyMax = static_cast<int>(std::max<long>(1024, clip + 16));
  c.bodyMax_ = bodyMax;
  c.tailP_ = survival(bodyMax + 1);
  std::vector<double> pmf(static_cast<std::size_t>(bodyMax) + 1);
  for (long n = 0; n <= bodyMax; ++n) pmf[n] = survival(n) - survival(n + 1);
  c.body_ = AliasTable(pmf);
  return c;
}

CountLaw CountLaw::pareto_tail_with_mean(double alpha, double mean,
                                         int minCount) {
  if (mean <= minCount)
    throw std::invalid_argument("CountLaw: mean must exceed minCount");
  double lo = 0.0, hi = 1.0;
  while (pareto_tail(alpha, hi, minCount).mean() < mean) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pareto_tail(alpha, mid, minCount).mean() < mean)
      lo = mid;
    else
      hi = mid;
  }
  return pareto_tail(alpha, 0.5 * (lo + hi), minCount);
}

double CountLaw::pgf(double s) const {
  if (s < 0.0 || s >= 1.0)
    throw std::invalid_argument("CountLaw::pgf: s in [0,1) required");
  switch (kind_) {
    case Kind::Deterministic:
      return std::pow(s, fixed_);
    case Kind::Table: {
      double v = 0.0, sk = 1.0;
      for (double p : probs_) {
        v += p * sk;
        sk *= s;
      }
      return v;
    }
    case Kind::ParetoTail: {
      if (s == 0.0) {
        return minCount_ == 0
                   ? 1.0 - std::min(1.0, d_ * std::pow(1.0, -alpha_))
                   : 0.0;
      }
      if (s > 0.9995)
        throw std::domain_error(
            "CountLaw::pgf: s too close to 1 (theta*a too small)");
      auto survival = [&](long n) {
        if (n <= minCount_) return 1.0;
        return std::min(1.0, d_ * std::pow(static_cast<double>(n), -alpha_));
      };
      double v = 0.0, sk = 1.0;  // sk = s^n
      long n = 0;
      while (true) {
        const double sn = survival(n), sn1 = survival(n + 1);
        v += (sn - sn1) * sk;
        // remaining mass bound: s^{n+1} * P(N >= n+1) / (1-s)
        if (sk * s * sn1 / (1.0 - s) < kTiny) break;
        sk *= s;
        ++n;
      }
      return v;
    }
  }
  return 0.0;
}

int CountLaw::sample(StreamRng& rng) const {
  switch (kind_) {
    case Kind::Deterministic:
      return fixed_;
    case Kind::Table:
      return static_cast<int>(body_.sample(rng));
    case Kind::ParetoTail: {
      const double u = rng.next_unit();
      if (u < tailP_) {
        // Exact inversion in the tail: N = floor((d/u)^{1/alpha}).
        const double n = std::floor(std::pow(d_ / u, 1.0 / alpha_));
        return static_cast<int>(
            std::max<double>(minCount_, std::min(n, 2.147e9)));
      }
      return static_cast<int>(body_.sample(rng));
    }
  }
  return 0;
}

std::string CountLaw::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Deterministic: os << "Deterministic(" << fixed_ << ")"; break;
    case Kind::Table: os << "Table(" << probs_.size() << " entries)"; break;
    case Kind::ParetoTail:
      os << "ParetoTail(alpha=" << alpha_ << ",d=" << d_
         << ",minCount=" << minCount_ << ")";
      break;
  }
  return os.str();
}

// ----------------------------------------------------------------------------
// OffspringLaw
// ----------------------------------------------------------------------------

OffspringLaw OffspringLaw::pareto_count(CountLaw count, DisplacementLaw disp) {
  OffspringLaw law;
  law.kind = Kind::ParetoCount;
  law.count = std::move(count);
  law.disp = disp;
  return law;
}

OffspringLaw OffspringLaw::galton_watson(CountLaw count) {
  OffspringLaw law;
  law.kind = Kind::GaltonWatson;
  law.count = std::move(count);
  law.disp = DisplacementLaw::point_mass(0.0);
  return law;
}

OffspringLaw OffspringLaw::infinite_points(CountLaw klaw, DisplacementLaw ylaw,
                                           double a) {
  if (a <= 0.0)
    throw std::invalid_argument("InfinitePoints: lattice spacing a > 0");
  if (!ylaw.is_positive())
    throw std::invalid_argument("InfinitePoints: Y law must be positive");
  if (klaw.min_count() < 1)
    throw std::invalid_argument("InfinitePoints: K must be >= 1");
  OffspringLaw law;
  law.kind = Kind::InfinitePoints;
  law.count = std::move(klaw);
  law.disp = ylaw;
  law.a = a;
  return law;
}

OffspringLaw OffspringLaw::custom(
    CustomSampler sampler, std::optional<std::function<double(double)>> m) {
  OffspringLaw law;
  law.kind = Kind::Custom;
  law.customSampler = std::move(sampler);
  law.customM = std::move(m);
  return law;
}

bool OffspringLaw::displacements_all_zero() const {
  switch (kind) {
    case Kind::GaltonWatson:
      return true;
    case Kind::ParetoCount:
      return disp.is_zero();
    default:
      return false;
  }
}

std::string OffspringLaw::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::ParetoCount:
      os << "ParetoCount{" << count.describe() << ", X~" << disp.describe()
         << "}";
      break;
    case Kind::GaltonWatson:
      os << "GaltonWatson{" << count.describe() << "}";
      break;
    case Kind::InfinitePoints:
      os << "InfinitePoints{K~" << count.describe() << ", Y~"
         << disp.describe() << ", a=" << a << "}";
      break;
    case Kind::Custom:
      os << "Custom{" << (customM ? "analytic m" : "sampler only") << "}";
      break;
  }
  return os.str();
}

// ----------------------------------------------------------------------------
// Transforms and condition checks
// ----------------------------------------------------------------------------

double laplace_m(const OffspringLaw& law, double theta) {
  switch (law.kind) {
    case OffspringLaw::Kind::GaltonWatson:
      // All displacements at 0, so m(theta) = E[N] for every theta.
      return law.count.mean();
    case OffspringLaw::Kind::ParetoCount: {
      const double lx = law.disp.laplace(theta);
      if (!std::isfinite(lx)) return kInfiniteTransform;
      return law.count.mean() * lx;
    }
    case OffspringLaw::Kind::InfinitePoints: {
      if (theta * law.a <= 0.0)
        throw std::domain_error(
            "laplace_m: theta*a > 0 required for InfinitePoints");
      const double ly = law.disp.laplace(theta);
      if (!std::isfinite(ly)) return kInfiniteTransform;
      const double s = std::exp(-theta * law.a);
      // E[ sum_{k>K} e^{-theta a k} ] = (1-s)^{-1} E[s^{K+1}]
      const double geometric = s * law.count.pgf(s) / (1.0 - s);
      return law.count.mean() * ly + geometric;
    }
    case OffspringLaw::Kind::Custom:
      if (!law.customM)
        throw std::domain_error("laplace_m: Custom law without analytic m");
      return (*law.customM)(theta);
  }
  return kInfiniteTransform;
}

double kappa(const OffspringLaw& law, double theta, double alpha) {
  // Same arithmetic as laplace_m by construction; no re-derivation.
  const double mT = laplace_m(law, theta);
  const double mA = laplace_m(law, alpha * theta);
  if (!std::isfinite(mT) || !std::isfinite(mA))
    throw std::domain_error("kappa: infinite Laplace transform");
  return mA / std::pow(mT, alpha);
}

LawReport check_conditions(const OffspringLaw& law, double theta,
                           double alpha) {
  LawReport r;
  double mT = kInfiniteTransform, mA = kInfiniteTransform;
  try {
    mT = laplace_m(law, theta);
    mA = laplace_m(law, alpha * theta);
  } catch (const std::domain_error&) {
    // leave infinite; reported through the finiteness flags below
  }
  r.mTheta = mT;
  r.mAlphaTheta = mA;
  const bool finite = std::isfinite(mT) && std::isfinite(mA);
  r.kappa = finite ? mA / std::pow(mT, alpha)
                   : std::numeric_limits<double>::quiet_NaN();

  r.conditions.emplace_back("alpha_in_range", alpha > 1.0 && alpha < 2.0);
  r.conditions.emplace_back("supercritical", law.mean_count() > 1.0);
  r.conditions.emplace_back("m_finite", finite);
  r.conditions.emplace_back("kappa_lt_1", finite && r.kappa < 1.0);
  if (law.kind == OffspringLaw::Kind::ParetoCount) {
    // E[e^{-alpha theta X}] < E[N]^{alpha-1} E[e^{-theta X}]^alpha < inf
    const double la = law.disp.laplace(alpha * theta);
    const double lt = law.disp.laplace(theta);
    const bool ok = std::isfinite(la) && std::isfinite(lt) &&
                    la < std::pow(law.count.mean(), alpha - 1.0) *
                             std::pow(lt, alpha);
    r.conditions.emplace_back("displacement_moment_condition", ok);
  }
  try {
    r.tailConstant = tail_constant_w1(law, theta, alpha);
  } catch (const std::exception&) {
    r.tailConstant = std::nullopt;
  }
  return r;
}

bool LawReport::all_ok() const {
  for (const auto& [label, ok] : conditions)
    if (!ok) return false;
  return true;
}

bool LawReport::condition(const std::string& label) const {
  for (const auto& [l, ok] : conditions)
    if (l == label) return ok;
  throw std::out_of_range("LawReport: unknown condition " + label);
}

double tail_constant_w1(const OffspringLaw& law, double theta, double alpha) {
  switch (law.kind) {
    case OffspringLaw::Kind::GaltonWatson:
    case OffspringLaw::Kind::ParetoCount:
    case OffspringLaw::Kind::InfinitePoints: {
      const double d = law.count.tail_d();
      if (d == 0.0) return 0.0;
      if (std::abs(law.count.tail_alpha() - alpha) > 1e-12)
        throw std::invalid_argument(
            "tail_constant_w1: count tail index must equal alpha");
      const double m = laplace_m(law, theta);
      const double l = law.disp.laplace(theta);  // 1 for GaltonWatson
      if (!std::isfinite(m) || !std::isfinite(l))
        throw std::domain_error("tail_constant_w1: infinite transform");
      // P(W_1 > x) = P(sum e^{-theta X_j} > m x) ~ d (L(theta)/m)^alpha x^-alpha
      return d * std::pow(l / m, alpha);
    }
    case OffspringLaw::Kind::Custom:
      throw std::invalid_argument(
          "tail_constant_w1: no closed form for Custom laws");
  }
  return 0.0;
}

std::pair<double, double> calibrate_infinite_example(
    const CountLaw& klaw, const DisplacementLaw& ylaw, double a,
    double targetM) {
  if (a <= 0.0) throw std::invalid_argument("calibrate: a > 0 required");
  if (targetM <= 0.0)
    throw std::invalid_argument("calibrate: targetM > 0 required");
  if (klaw.mean() <= 1.0)
    throw NoRootError("calibrate: E[K] <= 1, no supercritical calibration");
  const OffspringLaw law = OffspringLaw::infinite_points(klaw, ylaw, a);
  auto g = [&](double theta) { return laplace_m(law, theta) - targetM; };

  // m(theta) -> +inf as theta -> 0+ via the geometric factor. The left
  // bracket edge keeps e^{-theta a} away from 1, where the pgf series is
  // unusable; m there is ~2000, so any desk-scale target lies inside.
  const double lo0 = -std::log(0.9995) / a;
  double lo = lo0;
  if (!(g(lo) > 0.0))
    throw NoRootError("calibrate: m(theta) below target near theta=0");
  double hi = 1.0;
  int guard = 0;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 60)
      throw NoRootError(
          "calibrate: no root; E[K] E[e^{-theta Y}] >= target on bracket");
  }
  for (int it = 0; it < 500; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = g(mid);
    if (std::abs(v) <= 1e-10) return {mid, a};
    (v > 0.0 ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  if (std::abs(g(theta)) > 1e-10)
    throw NoRootError("calibrate: bisection failed to reach tolerance");
  return {theta, a};
}

OffspringSample sample_offspring(const OffspringLaw& law, double theta,
                                 double truncationEps, StreamRng& rng) {
  OffspringSample out;
  sample_offspring_into(law, theta, truncationEps, rng, out.points,
                        out.truncatedWeightBound);
  return out;
}

void sample_offspring_into(const OffspringLaw& law, double theta,
                           double truncationEps, StreamRng& rng,
                           std::vector<double>& points,
                           double& truncatedBound) {
  if (truncationEps < 0.0)
    throw std::invalid_argument("sample_offspring: eps >= 0 required");
  points.clear();
  truncatedBound = 0.0;
  switch (law.kind) {
    case OffspringLaw::Kind::GaltonWatson: {
      const int n = law.count.sample(rng);
      points.assign(static_cast<std::size_t>(n), 0.0);
      return;
    }
    case OffspringLaw::Kind::ParetoCount: {
      const int n = law.count.sample(rng);
      points.reserve(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) points.push_back(law.disp.sample(rng));
      return;
    }
    case OffspringLaw::Kind::InfinitePoints: {
      if (truncationEps == 0.0)
        throw std::invalid_argument(
            "sample_offspring: eps > 0 required to truncate infinite law");
      if (theta * law.a <= 0.0)
        throw std::domain_error("sample_offspring: theta*a > 0 required");
      const long k = law.count.sample(rng);
      points.reserve(static_cast<std::size_t>(k) + 8);
      for (long j = 0; j < k; ++j) points.push_back(law.disp.sample(rng));
      // lattice points a*kk for kk > K, kept while
      // e^{-theta a kk} >= eps e^{-theta a (K+1)}
      const double cut =
          static_cast<double>(k + 1) + std::log(1.0 / truncationEps) /
                                           (theta * law.a);
      const long kstar = static_cast<long>(std::floor(cut)) + 1;
      for (long kk = k + 1; kk < kstar; ++kk)
        points.push_back(law.a * static_cast<double>(kk));
      truncatedBound = std::exp(-theta * law.a * static_cast<double>(kstar)) /
                       (1.0 - std::exp(-theta * law.a));
      return;
    }
    case OffspringLaw::Kind::Custom:
      if (!law.customSampler)
        throw std::domain_error("sample_offspring: Custom law without sampler");
      law.customSampler(theta, truncationEps, rng, points, truncatedBound);
      return;
  }
}

}  // namespace brw
