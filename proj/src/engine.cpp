#include "brw/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace brw {

LawContext LawContext::make(OffspringLaw law, double theta, double alpha) {
  LawContext ctx;
  ctx.theta = theta;
  ctx.alpha = alpha;
  ctx.mTheta = laplace_m(law, theta);
  ctx.mAlphaTheta = laplace_m(law, alpha * theta);
  ctx.law = std::move(law);
  if (!std::isfinite(ctx.mTheta) || !std::isfinite(ctx.mAlphaTheta))
    throw std::domain_error("LawContext: m(theta) and m(alpha theta) must be finite");
  if (!(ctx.mTheta > 0.0) || !(ctx.mAlphaTheta > 0.0))
    throw std::domain_error("LawContext: m must be positive (P(N=0) < 1)");
  return ctx;
}

void SimulationPolicy::validate() const {
  if (maxGeneration < 1)
    throw std::invalid_argument("policy: maxGeneration >= 1 required");
  if (!(horizon < maxGeneration))
    throw std::invalid_argument("policy: horizon < maxGeneration required");
  if (populationCap < 1)
    throw std::invalid_argument("policy: populationCap >= 1 required");
  if (pruneEpsilon < 0.0 || offspringTruncationEpsilon < 0.0)
    throw std::invalid_argument("policy: epsilons must be nonnegative");
  for (int r : lags)
    if (r < 0 || r > horizon)
      throw std::invalid_argument("policy: lags must lie in [0, horizon]");
}

Population Population::ancestor(std::uint64_t rootKey) {
  Population p;
  p.weightsTheta = {1.0};
  p.weightsAlphaTheta = {1.0};
  p.streams = {rootKey};
  return p;
}

double Population::total_theta() const {
  return std::accumulate(weightsTheta.begin(), weightsTheta.end(), 0.0);
}

double Population::total_alpha_theta() const {
  return std::accumulate(weightsAlphaTheta.begin(), weightsAlphaTheta.end(),
                         0.0);
}

Population step_generation(const Population& pop, const LawContext& ctx,
                           const SimulationPolicy& policy) {
  Population next;
  next.generation = pop.generation + 1;
  next.prunedMassBound = pop.prunedMassBound;
  next.capped = pop.capped;
  if (pop.size() == 0) return next;  // extinction is absorbing

  const double threshold = policy.pruneEpsilon * pop.total_theta();
  const double invMT = 1.0 / ctx.mTheta;
  const double invMA = 1.0 / ctx.mAlphaTheta;

  std::vector<double> pts;
  double truncBound = 0.0;
  next.weightsTheta.reserve(pop.size() * 2);
  next.weightsAlphaTheta.reserve(pop.size() * 2);
  next.streams.reserve(pop.size() * 2);

  for (std::size_t i = 0; i < pop.size(); ++i) {
    StreamRng rng(pop.streams[i]);
    sample_offspring_into(ctx.law, ctx.theta, policy.offspringTruncationEpsilon,
                          rng, pts, truncBound);
    next.prunedMassBound += pop.weightsTheta[i] * truncBound * invMT;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double x = pts[j];
      const double wt = pop.weightsTheta[i] * std::exp(-ctx.theta * x) * invMT;
      if (wt < threshold) {
        next.prunedMassBound += wt;
        continue;
      }
      const double wa = pop.weightsAlphaTheta[i] *
                        std::exp(-ctx.alpha * ctx.theta * x) * invMA;
      next.weightsTheta.push_back(wt);
      next.weightsAlphaTheta.push_back(wa);
      next.streams.push_back(child_key(pop.streams[i], j));
    }
  }

  if (next.size() > policy.populationCap) {
    // Drop the smallest weights first; ties break on index so the result
    // is independent of scheduling.
    std::vector<std::uint32_t> order(next.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (next.weightsTheta[a] != next.weightsTheta[b])
        return next.weightsTheta[a] < next.weightsTheta[b];
      return a < b;
    });
    const std::size_t drop = next.size() - policy.populationCap;
    std::vector<bool> dead(next.size(), false);
    for (std::size_t k = 0; k < drop; ++k) {
      dead[order[k]] = true;
      next.prunedMassBound += next.weightsTheta[order[k]];
    }
    Population kept;
    kept.generation = next.generation;
    kept.prunedMassBound = next.prunedMassBound;
    kept.capped = true;
    kept.weightsTheta.reserve(policy.populationCap);
    kept.weightsAlphaTheta.reserve(policy.populationCap);
    kept.streams.reserve(policy.populationCap);
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (dead[i]) continue;
      kept.weightsTheta.push_back(next.weightsTheta[i]);
      kept.weightsAlphaTheta.push_back(next.weightsAlphaTheta[i]);
      kept.streams.push_back(next.streams[i]);
    }
    return kept;
  }
  return next;
}

namespace {

// Count-only simulation for zero-displacement laws: all particles of a
// generation carry the same weight m^{-n}, so only the generation size is
// random. Streams are keyed by (replicate, generation, index); no pruning
// reordering can occur because every child is born above the threshold or
// the whole generation is below it.
MartingalePath simulate_fast(const LawContext& ctx,
                             const SimulationPolicy& policy,
                             std::uint64_t rootKey) {
  const int M = policy.maxGeneration;
  MartingalePath path;
  path.wTheta.assign(static_cast<std::size_t>(M) + 1, 0.0);
  path.wAlphaTheta.assign(static_cast<std::size_t>(M) + 1, 0.0);
  path.wTheta[0] = 1.0;
  path.wAlphaTheta[0] = 1.0;

  const double invMT = 1.0 / ctx.mTheta;
  const double invMA = 1.0 / ctx.mAlphaTheta;
  std::uint64_t z = 1;
  double wT = 1.0, wA = 1.0;  // per-particle weights m(theta)^-n, m(at)^-n
  for (int gen = 0; gen < M; ++gen) {
    if (z == 0) {
      if (!path.extinctAt) path.extinctAt = gen;
      continue;
    }
    const std::uint64_t genKey =
        generation_key(rootKey, static_cast<std::uint64_t>(gen));
    std::uint64_t children = 0;
    for (std::uint64_t i = 0; i < z; ++i) {
      StreamRng rng(generation_particle_key(genKey, i));
      children += static_cast<std::uint64_t>(ctx.law.count.sample(rng));
    }
    const double cwT = wT * invMT;
    const double cwA = wA * invMA;
    if (cwT < policy.pruneEpsilon * (static_cast<double>(z) * wT)) {
      path.prunedMassBound += static_cast<double>(children) * cwT;
      children = 0;
    }
    if (children > policy.populationCap) {
      path.prunedMassBound +=
          static_cast<double>(children - policy.populationCap) * cwT;
      children = policy.populationCap;
      path.capped = true;
    }
    z = children;
    wT = cwT;
    wA = cwA;
    path.wTheta[gen + 1] = static_cast<double>(z) * wT;
    path.wAlphaTheta[gen + 1] = static_cast<double>(z) * wA;
  }
  // Extinction at earlier generations is caught by the next loop pass;
  // only death exactly at generation M needs the fixup.
  if (z == 0 && !path.extinctAt) path.extinctAt = M;
  return path;
}

MartingalePath simulate_generic(const LawContext& ctx,
                                const SimulationPolicy& policy,
                                std::uint64_t rootKey) {
  const int M = policy.maxGeneration;
  MartingalePath path;
  path.wTheta.assign(static_cast<std::size_t>(M) + 1, 0.0);
  path.wAlphaTheta.assign(static_cast<std::size_t>(M) + 1, 0.0);
  path.wTheta[0] = 1.0;
  path.wAlphaTheta[0] = 1.0;

  Population pop = Population::ancestor(rootKey);
  for (int gen = 1; gen <= M; ++gen) {
    pop = step_generation(pop, ctx, policy);
    path.wTheta[gen] = pop.total_theta();
    path.wAlphaTheta[gen] = pop.total_alpha_theta();
    if (pop.size() == 0 && !path.extinctAt) path.extinctAt = gen;
  }
  path.prunedMassBound = pop.prunedMassBound;
  path.capped = pop.capped;
  return path;
}

}  // namespace

MartingalePath simulate_path(const LawContext& ctx,
                             const SimulationPolicy& policy,
                             std::uint64_t rootKey) {
  policy.validate();
  if (ctx.equal_weights()) return simulate_fast(ctx, policy, rootKey);
  return simulate_generic(ctx, policy, rootKey);
}

MartingalePath simulate_path(const LawContext& ctx,
                             const SimulationPolicy& policy,
                             std::uint64_t seed, std::uint64_t replicateIndex) {
  return simulate_path(ctx, policy, replicate_key(seed, replicateIndex));
}

std::vector<FluctuationSample> fluctuation_samples(
    const std::vector<MartingalePath>& paths, int n,
    const std::vector<int>& lags, double kappa, double alpha) {
  for (int r : lags)
    if (r < 0 || r > n)
      throw std::out_of_range("fluctuation_samples: lag exceeds horizon n");
  std::vector<FluctuationSample> out;
  out.reserve(paths.size());
  std::vector<double> scale(lags.size());
  for (std::size_t k = 0; k < lags.size(); ++k)
    scale[k] = std::pow(kappa, -static_cast<double>(n - lags[k]) / alpha);
  for (const auto& p : paths) {
    if (n >= p.max_generation())
      throw std::out_of_range("fluctuation_samples: horizon n must be < M");
    FluctuationSample s;
    s.v.resize(lags.size());
    const double wM = p.wTheta.back();
    for (std::size_t k = 0; k < lags.size(); ++k)
      s.v[k] = scale[k] * (wM - p.wTheta[static_cast<std::size_t>(n - lags[k])]);
    s.mixWeight = p.wAlphaTheta[static_cast<std::size_t>(n)];
    out.push_back(std::move(s));
  }
  return out;
}

double weighted_increment_series(const MartingalePath& path,
                                 const std::vector<double>& coefficients) {
  if (static_cast<int>(coefficients.size()) > path.max_generation())
    throw std::length_error(
        "weighted_increment_series: more coefficients than increments");
  double acc = 0.0;
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    acc += coefficients[j] * (path.wTheta[j + 1] - path.wTheta[j]);
  return acc;
}

}  // namespace brw
