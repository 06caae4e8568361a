#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "brw/engine.hpp"

using namespace brw;

namespace {

CountLaw heyde_counts() { return CountLaw::pareto_tail_with_mean(1.5, 2.0, 0); }

SimulationPolicy small_policy(int M, int n) {
  SimulationPolicy p;
  p.maxGeneration = M;
  p.horizon = n;
  p.lags = {0};
  p.pruneEpsilon = 0.0;
  return p;
}

struct Moments {
  double mean, se;
};

Moments mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double sq = 0.0;
  for (double x : xs) sq += (x - m) * (x - m);
  return {m, std::sqrt(sq / (n - 1.0) / n)};
}

}  // namespace

TEST_SUITE_BEGIN("engine");

TEST_CASE("deterministic binary tree keeps W at one") {
  const auto law = OffspringLaw::galton_watson(CountLaw::deterministic(2));
  const auto ctx = LawContext::make(law, 0.0, 1.5);
  const auto path = simulate_path(ctx, small_policy(10, 4), 123, 0);
  for (double w : path.wTheta) CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
  for (double w : path.wAlphaTheta)
    CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(path.extinctAt.has_value());
  CHECK(path.wTheta[0] == 1.0);
  CHECK(path.wAlphaTheta[0] == 1.0);
}

TEST_CASE("step_generation doubles the deterministic population") {
  const auto law = OffspringLaw::galton_watson(CountLaw::deterministic(2));
  const auto ctx = LawContext::make(law, 0.0, 1.5);
  SimulationPolicy policy = small_policy(10, 4);
  Population pop = Population::ancestor(replicate_key(9, 9));
  for (int gen = 1; gen <= 6; ++gen) {
    pop = step_generation(pop, ctx, policy);
    CHECK(pop.size() == (1u << gen));
    for (double w : pop.weightsTheta)
      CHECK(w == doctest::Approx(std::pow(2.0, -gen)).epsilon(1e-12));
    CHECK(pop.generation == gen);
  }
}

TEST_CASE("extinction is absorbing") {
  // P(N=0) = 0.7, so immediate extinction is common
  const auto law = OffspringLaw::galton_watson(CountLaw::table({0.7, 0.2, 0.1}));
  const auto ctx = LawContext::make(law, 0.0, 1.5);
  bool sawImmediate = false;
  for (int rep = 0; rep < 50 && !sawImmediate; ++rep) {
    const auto path = simulate_path(ctx, small_policy(5, 2), 7, rep);
    if (path.extinctAt && *path.extinctAt == 1) {
      sawImmediate = true;
      for (int g = 1; g <= 5; ++g) CHECK(path.wTheta[g] == 0.0);
    }
  }
  CHECK(sawImmediate);

  // a law with P(N=0) = 1 has m = 0 and no martingale normalization
  CHECK_THROWS_AS(LawContext::make(OffspringLaw::galton_watson(
                                       CountLaw::deterministic(0)),
                                   0.0, 1.5),
                  std::domain_error);

  // empty population steps to empty
  Population empty;
  empty.generation = 3;
  const auto next = step_generation(empty, ctx, small_policy(5, 2));
  CHECK(next.size() == 0);
  CHECK(next.generation == 4);
}

TEST_CASE("subcritical populations die out with zero tail") {
  const auto law =
      OffspringLaw::galton_watson(CountLaw::table({0.7, 0.2, 0.1}));
  const auto ctx = LawContext::make(law, 0.0, 1.5);
  int extinct = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto path = simulate_path(ctx, small_policy(25, 4), 55, rep);
    if (path.extinctAt) {
      ++extinct;
      for (int g = *path.extinctAt; g <= 25; ++g)
        CHECK(path.wTheta[g] == 0.0);
    }
  }
  CHECK(extinct == 200);  // mean 0.4, 25 generations
}

TEST_CASE("one-step weight sums are conditionally unbiased") {
  // E[sum of child weightsTheta | parent weight y] = y
  const auto law = OffspringLaw::pareto_count(
      heyde_counts(), DisplacementLaw::exponential(2.0));
  const double theta = 0.5;
  const auto ctx = LawContext::make(law, theta, 1.5);
  SimulationPolicy policy = small_policy(3, 1);
  const double y = 0.37;
  const int n = 100000;
  std::vector<double> sums(n);
  for (int i = 0; i < n; ++i) {
    Population pop;
    pop.weightsTheta = {y};
    pop.weightsAlphaTheta = {std::pow(y, 1.5)};
    pop.streams = {replicate_key(1234, i)};
    const auto next = step_generation(pop, ctx, policy);
    sums[i] = next.total_theta();
  }
  const auto st = mean_se(sums);
  CHECK(std::abs(st.mean - y) < 5.0 * st.se);
}

TEST_CASE("martingale increments center on zero") {
  const auto law = OffspringLaw::galton_watson(heyde_counts());
  const auto ctx = LawContext::make(law, 0.0, 1.5);
  const int n = 20000;
  std::vector<std::vector<double>> w(7, std::vector<double>(n));
  for (int rep = 0; rep < n; ++rep) {
    const auto path = simulate_path(ctx, small_policy(6, 2), 321, rep);
    for (int g = 0; g <= 6; ++g) w[g][rep] = path.wTheta[g];
  }
  for (int g = 0; g < 6; ++g) {
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = w[g + 1][i] - w[g][i];
    const auto st = mean_se(diff);
    CHECK(std::abs(st.mean) < 5.0 * st.se);
  }
}

TEST_CASE("calibrated infinite-points law has mean-one limit proxy") {
  const CountLaw klaw = CountLaw::pareto_tail_with_mean(1.5, 1.25, 1);
  const DisplacementLaw ylaw = DisplacementLaw::exponential(1.0);
  const auto [theta, a] = calibrate_infinite_example(klaw, ylaw, 10.0);
  const auto law = OffspringLaw::infinite_points(klaw, ylaw, a);
  const auto ctx = LawContext::make(law, theta, 1.5);
  SimulationPolicy policy = small_policy(6, 2);
  policy.pruneEpsilon = 1e-9;
  policy.offspringTruncationEpsilon = 1e-4;
  const int n = 10000;
  std::vector<double> wM(n), wA(n);
  for (int rep = 0; rep < n; ++rep) {
    const auto path = simulate_path(ctx, policy, 777, rep);
    wM[rep] = path.wTheta[6];
    wA[rep] = path.wAlphaTheta[6];
  }
  const auto st = mean_se(wM);
  CHECK(std::abs(st.mean - 1.0) < 5.0 * st.se);
  const auto sa = mean_se(wA);
  CHECK(std::abs(sa.mean - 1.0) < 5.0 * sa.se);
}

TEST_CASE("per-particle weights at alpha theta are exact transforms") {
  const auto law = OffspringLaw::pareto_count(
      heyde_counts(), DisplacementLaw::normal(0.0, 1.0));
  const double theta = 0.4, alpha = 1.5;
  const auto ctx = LawContext::make(law, theta, alpha);
  SimulationPolicy policy = small_policy(12, 4);
  policy.pruneEpsilon = 1e-12;
  Population pop = Population::ancestor(replicate_key(2024, 3));
  for (int gen = 1; gen <= 8 && pop.size() > 0; ++gen) {
    pop = step_generation(pop, ctx, policy);
    const double ratio =
        std::pow(ctx.mTheta, alpha * gen) / std::pow(ctx.mAlphaTheta, gen);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const double expected = std::pow(pop.weightsTheta[i], alpha) * ratio;
      CHECK(pop.weightsAlphaTheta[i] ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("pruning is sound") {
  const auto law = OffspringLaw::pareto_count(
      heyde_counts(), DisplacementLaw::exponential(2.0));
  const auto ctx = LawContext::make(law, 0.5, 1.5);
  SimulationPolicy exact = small_policy(6, 2);
  SimulationPolicy pruned = exact;
  pruned.pruneEpsilon = 2e-3;  // aggressive, to actually trigger

  const int n = 4000;
  std::vector<double> diff(n), bound(n);
  bool anyPruned = false;
  for (int rep = 0; rep < n; ++rep) {
    const auto a = simulate_path(ctx, exact, 99, rep);
    const auto b = simulate_path(ctx, pruned, 99, rep);
    diff[rep] = a.wTheta[6] - b.wTheta[6];
    bound[rep] = b.prunedMassBound;
    // dropping subtrees can only remove mass
    CHECK(diff[rep] >= -1e-12);
    anyPruned = anyPruned || b.prunedMassBound > 0.0;
    // untouched replicate implies identical trajectories
    if (b.prunedMassBound == 0.0)
      for (int g = 0; g <= 6; ++g) CHECK(a.wTheta[g] == b.wTheta[g]);
  }
  CHECK(anyPruned);
  // the accounted mass bounds the removed limit mass in expectation
  const auto d = mean_se(diff);
  const auto bm = mean_se(bound);
  CHECK(d.mean <= bm.mean + 5.0 * (d.se + bm.se));
  CHECK(d.mean > 0.0);
}

TEST_CASE("pruned mass bound never decreases along a trajectory") {
  const auto law = OffspringLaw::pareto_count(
      heyde_counts(), DisplacementLaw::exponential(2.0));
  const auto ctx = LawContext::make(law, 0.5, 1.5);
  SimulationPolicy policy = small_policy(8, 2);
  policy.pruneEpsilon = 1e-3;
  Population pop = Population::ancestor(replicate_key(31, 0));
  double last = 0.0;
  for (int gen = 1; gen <= 8; ++gen) {
    pop = step_generation(pop, ctx, policy);
    CHECK(pop.prunedMassBound >= last);
    last = pop.prunedMassBound;
  }
}

TEST_CASE("population cap drops the smallest weights and flags the path") {
  const auto law = OffspringLaw::galton_watson(CountLaw::deterministic(3));
  const auto ctx = LawContext::make(law, 0.0, 1.5);
  SimulationPolicy policy = small_policy(4, 1);
  policy.populationCap = 5;
  const auto path = simulate_path(ctx, policy, 10, 0);
  CHECK(path.capped);
  CHECK(path.prunedMassBound > 0.0);
  // 3^g children before the cap; afterwards exactly cap particles of weight 3^-g
  CHECK(path.wTheta[2] == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
  CHECK(path.wTheta[3] == doctest::Approx(5.0 / 27.0).epsilon(1e-12));
}

TEST_CASE("identical keys give bit-identical paths") {
  const auto law = OffspringLaw::pareto_count(
      heyde_counts(), DisplacementLaw::normal(0.0, 1.0));
  const auto ctx = LawContext::make(law, 0.3, 1.5);
  SimulationPolicy policy = small_policy(8, 3);
  policy.pruneEpsilon = 1e-12;
  const auto a = simulate_path(ctx, policy, 42, 17);
  const auto b = simulate_path(ctx, policy, 42, 17);
  CHECK(a.wTheta == b.wTheta);
  CHECK(a.wAlphaTheta == b.wAlphaTheta);
  const auto c = simulate_path(ctx, policy, 42, 18);
  CHECK(a.wTheta != c.wTheta);

  // the count-only fast path is deterministic too
  const auto gw = LawContext::make(OffspringLaw::galton_watson(heyde_counts()),
                                   0.0, 1.5);
  const auto f1 = simulate_path(gw, policy, 42, 17);
  const auto f2 = simulate_path(gw, policy, 42, 17);
  CHECK(f1.wTheta == f2.wTheta);
}

TEST_CASE("fast path and generic path agree in distribution") {
  // same count law; the generic route is forced by a nonzero point-mass
  // displacement, which at theta=0 leaves every weight untouched
  const auto fast = LawContext::make(
      OffspringLaw::galton_watson(heyde_counts()), 0.0, 1.5);
  const auto generic = LawContext::make(
      OffspringLaw::pareto_count(heyde_counts(),
                                 DisplacementLaw::point_mass(1.0)),
      0.0, 1.5);
  CHECK(fast.equal_weights());
  CHECK_FALSE(generic.equal_weights());

  SimulationPolicy policy = small_policy(8, 3);
  const int n = 20000;
  std::vector<double> wf(n), wg(n);
  int extF = 0, extG = 0;
  for (int rep = 0; rep < n; ++rep) {
    const auto a = simulate_path(fast, policy, 1001, rep);
    const auto b = simulate_path(generic, policy, 2002, rep);
    wf[rep] = a.wTheta[8];
    wg[rep] = b.wTheta[8];
    extF += a.extinctAt.has_value();
    extG += b.extinctAt.has_value();
  }
  const auto mf = mean_se(wf), mg = mean_se(wg);
  CHECK(std::abs(mf.mean - mg.mean) < 5.0 * std::hypot(mf.se, mg.se));
  const double pf = extF / double(n), pg = extG / double(n);
  const double se = std::sqrt((pf * (1 - pf) + pg * (1 - pg)) / n);
  CHECK(std::abs(pf - pg) < 5.0 * se);
  // survival function comparison at a few fixed abscissas
  for (double x : {0.25, 1.0, 3.0}) {
    double sf = 0.0, sg = 0.0;
    for (int i = 0; i < n; ++i) {
      sf += wf[i] > x;
      sg += wg[i] > x;
    }
    sf /= n;
    sg /= n;
    const double s = std::sqrt((sf * (1 - sf) + sg * (1 - sg)) / n) + 1e-12;
    CHECK(std::abs(sf - sg) < 5.0 * s);
  }
}

TEST_CASE("fluctuation samples") {
  MartingalePath flat;
  flat.wTheta = {1, 1, 1, 1, 1, 1};
  flat.wAlphaTheta = {1, 1, 1, 1, 1, 1};
  MartingalePath ramp;
  ramp.wTheta = {1, 2, 3, 4, 5, 6};
  ramp.wAlphaTheta = {1, 1, 2, 3, 5, 8};
  const std::vector<MartingalePath> paths{flat, ramp};

  SUBCASE("constant path maps to the zero vector") {
    const auto out = fluctuation_samples({flat}, 3, {0, 1, 2}, 0.5, 1.5);
    REQUIRE(out.size() == 1);
    for (double v : out[0].v) CHECK(v == 0.0);
    CHECK(out[0].mixWeight == 1.0);
  }
  SUBCASE("unit kappa gives raw differences") {
    const auto out = fluctuation_samples(paths, 3, {0}, 1.0, 1.5);
    CHECK(out[0].v[0] == 0.0);
    CHECK(out[1].v[0] == doctest::Approx(6.0 - 4.0));
    CHECK(out[1].mixWeight == 3.0);
  }
  SUBCASE("scaling follows kappa^{-(n-r)/alpha}") {
    const double kappa = 0.5, alpha = 1.5;
    const auto out = fluctuation_samples(paths, 3, {0, 2}, kappa, alpha);
    CHECK(out[1].v[0] ==
          doctest::Approx(std::pow(kappa, -2.0) * (6.0 - 4.0)));
    CHECK(out[1].v[1] == doctest::Approx(std::pow(kappa, -2.0 / 3.0) *
                                         (6.0 - 2.0)));
  }
  SUBCASE("lag beyond the horizon is an index error") {
    CHECK_THROWS_AS(fluctuation_samples(paths, 3, {4}, 0.5, 1.5),
                    std::out_of_range);
    CHECK_THROWS_AS(fluctuation_samples(paths, 5, {0}, 0.5, 1.5),
                    std::out_of_range);
  }
}

TEST_CASE("weighted increment series") {
  MartingalePath path;
  path.wTheta = {1.0, 1.5, 0.75, 2.0, 2.5};
  path.wAlphaTheta = path.wTheta;

  SUBCASE("all-ones telescopes to W_M - 1") {
    const std::vector<double> ones(4, 1.0);
    CHECK(weighted_increment_series(path, ones) ==
          doctest::Approx(path.wTheta[4] - 1.0));
  }
  SUBCASE("leading unit extracts W_1 - 1") {
    CHECK(weighted_increment_series(path, {1.0}) ==
          doctest::Approx(path.wTheta[1] - 1.0));
    CHECK(weighted_increment_series(path, {1.0, 0.0, 0.0}) ==
          doctest::Approx(path.wTheta[1] - 1.0));
  }
  SUBCASE("alternating coefficients") {
    const double expected = (1.5 - 1.0) - (0.75 - 1.5) + (2.0 - 0.75) -
                            (2.5 - 2.0);
    CHECK(weighted_increment_series(path, {1.0, -1.0, 1.0, -1.0}) ==
          doctest::Approx(expected));
  }
  SUBCASE("too many coefficients is a length error") {
    CHECK_THROWS_AS(weighted_increment_series(path, std::vector<double>(5, 1.0)),
                    std::length_error);
  }
}

TEST_SUITE_END();
