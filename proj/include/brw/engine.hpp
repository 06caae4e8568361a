#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "brw/laws.hpp"
#include "brw/rng.hpp"

namespace brw {

// Law plus the transforms the engine divides by at every step.
struct LawContext {
  OffspringLaw law;
  double theta = 0.0;
  double alpha = 1.5;
  double mTheta = 1.0;
  double mAlphaTheta = 1.0;

  static LawContext make(OffspringLaw law, double theta, double alpha);

  // Zero-displacement laws keep all weights equal within a generation and
  // are simulated by the count-only fast path.
  bool equal_weights() const { return law.displacements_all_zero(); }
};

struct SimulationPolicy {
  int maxGeneration = 20;                      // M
  int horizon = 8;                             // n, n < M
  std::vector<int> lags = {0};                 // each lag r <= horizon
  double pruneEpsilon = 1e-12;                 // relative per-child threshold
  std::uint64_t populationCap = 1ULL << 62;
  double offspringTruncationEpsilon = 1e-12;

  void validate() const;
};

// One generation of particles as normalized weights at theta and at
// alpha*theta plus per-particle stream keys. The two weight vectors are
// deterministic transforms of the same positions.
struct Population {
  std::vector<double> weightsTheta;
  std::vector<double> weightsAlphaTheta;
  std::vector<std::uint64_t> streams;
  int generation = 0;
  double prunedMassBound = 0.0;
  bool capped = false;

  static Population ancestor(std::uint64_t rootKey);

  std::size_t size() const { return weightsTheta.size(); }
  double total_theta() const;
  double total_alpha_theta() const;
};

struct MartingalePath {
  std::vector<double> wTheta;       // W_0(theta) .. W_M(theta)
  std::vector<double> wAlphaTheta;  // W_0(alpha theta) .. W_M(alpha theta)
  std::optional<int> extinctAt;
  double prunedMassBound = 0.0;
  bool capped = false;

  int max_generation() const { return static_cast<int>(wTheta.size()) - 1; }
};

// Advances one generation: every particle draws a brood via
// sample_offspring on its own stream; children below the prune threshold
// or beyond the population cap are dropped with their mass accounted.
Population step_generation(const Population& pop, const LawContext& ctx,
                           const SimulationPolicy& policy);

// Full trajectory from the single ancestor. Deterministic in rootKey.
MartingalePath simulate_path(const LawContext& ctx,
                             const SimulationPolicy& policy,
                             std::uint64_t rootKey);

MartingalePath simulate_path(const LawContext& ctx,
                             const SimulationPolicy& policy,
                             std::uint64_t seed, std::uint64_t replicateIndex);

struct FluctuationSample {
  std::vector<double> v;   // kappa^{-(n-r)/alpha} (W_M - W_{n-r}) per lag r
  double mixWeight = 0.0;  // W_n(alpha theta)
};

std::vector<FluctuationSample> fluctuation_samples(
    const std::vector<MartingalePath>& paths, int n,
    const std::vector<int>& lags, double kappa, double alpha);

// sum_j a_j (W_{j+1} - W_j) over the given coefficients.
double weighted_increment_series(const MartingalePath& path,
                                 const std::vector<double>& coefficients);

}  // namespace brw
