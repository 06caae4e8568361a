#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "brw/alias_table.hpp"
#include "brw/rng.hpp"

namespace brw {

inline constexpr double kInfiniteTransform =
    std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Displacement laws (the X_j of a brood). Each variant has a closed-form
// Laplace transform E[e^{-theta X}] with an explicit finiteness domain.
// ---------------------------------------------------------------------------

struct DisplacementLaw {
  enum class Kind { Normal, Exponential, PointMass, Uniform };

  Kind kind = Kind::PointMass;
  double p1 = 0.0;  // mean / rate / location / lo
  double p2 = 0.0;  // variance / - / - / hi

  static DisplacementLaw normal(double mean, double variance);
  static DisplacementLaw exponential(double rate);
  static DisplacementLaw point_mass(double location);
  static DisplacementLaw uniform(double lo, double hi);

  // E[e^{-theta X}]; returns the infinite sentinel outside the domain.
  double laplace(double theta) const;
  bool laplace_finite(double theta) const;

  double sample(StreamRng& rng) const;

  bool is_zero() const { return kind == Kind::PointMass && p1 == 0.0; }
  // Support contained in [0, inf) with P(X > 0) > 0.
  bool is_positive() const;

  std::string describe() const;
};

// ---------------------------------------------------------------------------
// Discrete count laws (brood sizes N, and K of the infinite-points law).
//
// The heavy-tailed variant is the discretized Pareto
//     P(N >= n) = 1              for n <= minCount,
//     P(N >= n) = min(1, d n^-a) for n >  minCount,
// which matches P(N > x) ~ d x^-a exactly in the tail. Sampling is exact
// inversion N = max(minCount, floor((d/U)^{1/a})) with an alias-table body
// so the hot loop rarely touches pow().
// ---------------------------------------------------------------------------

class CountLaw {
 public:
  enum class Kind { Deterministic, Table, ParetoTail };

  CountLaw() = default;  // Deterministic(0)

  static CountLaw deterministic(int n);
  // pmf over {0, 1, ..., len-1}.
  static CountLaw table(std::vector<double> probs);
  static CountLaw pareto_tail(double alpha, double d, int minCount);
  // Solves for d so that the discretized Pareto has the requested mean.
  static CountLaw pareto_tail_with_mean(double alpha, double mean,
                                        int minCount);

  Kind kind() const { return kind_; }
  double mean() const { return mean_; }
  // Tail constant: P(N > x) ~ tail_d() * x^{-tail_alpha()}; 0 if light.
  double tail_d() const { return kind_ == Kind::ParetoTail ? d_ : 0.0; }
  double tail_alpha() const { return alpha_; }
  int min_count() const { return minCount_; }
  int fixed_value() const { return fixed_; }
  const std::vector<double>& table_probs() const { return probs_; }

  // E[s^N] for s in [0,1).
  double pgf(double s) const;

  int sample(StreamRng& rng) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Deterministic;
  double alpha_ = 0.0, d_ = 0.0;
  int minCount_ = 0;
  int fixed_ = 0;
  std::vector<double> probs_;
  double mean_ = 0.0;
  // ParetoTail body: values in [minCount, bodyMax_], tail beyond via pow.
  int bodyMax_ = 0;
  double tailP_ = 0.0;
  AliasTable body_;
};

// ---------------------------------------------------------------------------
// Offspring point-process laws.
// ---------------------------------------------------------------------------

struct OffspringSample {
  std::vector<double> points;  // realized displacements
  // Upper bound on the truncated raw weight sum_{dropped} e^{-theta x}.
  double truncatedWeightBound = 0.0;
};

using CustomSampler =
    std::function<void(double theta, double eps, StreamRng& rng,
                       std::vector<double>& points, double& truncatedBound)>;

struct OffspringLaw {
  enum class Kind { ParetoCount, GaltonWatson, InfinitePoints, Custom };

  Kind kind = Kind::GaltonWatson;
  CountLaw count;           // brood size; K for InfinitePoints
  DisplacementLaw disp;     // displacement; Y for InfinitePoints
  double a = 0.0;           // lattice spacing of InfinitePoints
  CustomSampler customSampler;
  std::optional<std::function<double(double)>> customM;

  static OffspringLaw pareto_count(CountLaw count, DisplacementLaw disp);
  static OffspringLaw galton_watson(CountLaw count);
  static OffspringLaw infinite_points(CountLaw klaw, DisplacementLaw ylaw,
                                      double a);
  static OffspringLaw custom(CustomSampler sampler,
                             std::optional<std::function<double(double)>> m);

  // E[N] (E[K] for InfinitePoints, whose actual brood is infinite).
  double mean_count() const { return count.mean(); }
  bool displacements_all_zero() const;

  std::string describe() const;
};

struct LawReport {
  double mTheta = 0.0;
  double mAlphaTheta = 0.0;
  double kappa = 0.0;
  std::optional<double> tailConstant;
  std::vector<std::pair<std::string, bool>> conditions;

  bool all_ok() const;
  bool condition(const std::string& label) const;
};

// Laplace transform of the intensity measure, m(theta) = E[int e^{-theta x} Z(dx)].
// Returns the infinite sentinel outside the finiteness domain.
double laplace_m(const OffspringLaw& law, double theta);

// kappa = m(alpha*theta) / m(theta)^alpha. Throws on infinite transforms.
double kappa(const OffspringLaw& law, double theta, double alpha);

// Evaluates supercriticality, transform finiteness, kappa < 1 and (for
// ParetoCount) the displacement moment condition; failures are flags.
LawReport check_conditions(const OffspringLaw& law, double theta, double alpha);

// Tail constant c in P(W_1(theta) > x) ~ c x^{-alpha}. Requires the count
// tail index to equal alpha. Throws where no closed form exists.
double tail_constant_w1(const OffspringLaw& law, double theta, double alpha);

struct NoRootError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finds theta with m(theta) = targetM for the infinite-points law at fixed
// lattice spacing a, by bracketed bisection to |m - target| <= 1e-10.
std::pair<double, double> calibrate_infinite_example(const CountLaw& klaw,
                                                     const DisplacementLaw& ylaw,
                                                     double a,
                                                     double targetM = 1.0);

// Realizes the points of one brood. For InfinitePoints the lattice tail is
// cut at the first k with e^{-theta a k} < eps * e^{-theta a (K+1)} and the
// discarded raw weight bound is reported.
OffspringSample sample_offspring(const OffspringLaw& law, double theta,
                                 double truncationEps, StreamRng& rng);

// Allocation-free variant for the engine's hot loop.
void sample_offspring_into(const OffspringLaw& law, double theta,
                           double truncationEps, StreamRng& rng,
                           std::vector<double>& points,
                           double& truncatedBound);

}  // namespace brw
