#pragma once

#include <cmath>
#include <cstdint>

namespace brw {

// Counter-based random number machinery. Every particle, replicate and
// generation owns a stream addressed by a 64-bit key; draws are pure
// functions of (key, counter), so pruning, capping or thread scheduling
// can never perturb another stream.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer (fmix64-style avalanche).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Derives an independent child key from (key, salt). Two finalizer rounds
// so that structured salts (0,1,2,...) land in unrelated streams.
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t salt) {
  return mix64(key ^ mix64(salt * kGolden + 0x632be59bd9b4e019ULL));
}

// One reproducible stream: splitmix64 seeded by the key.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() { return mix64(state_ += kGolden); }

  // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
  // inverse-power transforms are always finite.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_exponential() { return -std::log(next_unit()); }

  // Box-Muller; the second variate of each pair is cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_unit()));
    const double phi = 6.283185307179586476925286766559 * next_unit();
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  double next_normal(double mean, double stddev) {
    return mean + stddev * next_normal();
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Root key of one replicate.
constexpr std::uint64_t replicate_key(std::uint64_t seed,
                                      std::uint64_t replicateIndex) {
  return derive_key(mix64(seed + 0x51afd54fu), replicateIndex);
}

// Per-generation base key for the equal-weight fast path.
constexpr std::uint64_t generation_key(std::uint64_t replicateKey,
                                       std::uint64_t generation) {
  return derive_key(replicateKey, generation);
}

// Stream key of a particle identified by position within a generation.
// A plain affine offset suffices: StreamRng applies the finalizer to
// state+counter, so draw j of particle i is mix64(gen + i*STRIDE + j*GOLDEN),
// one finalizer per draw. The stride is a random odd constant; overlaps
// with the golden-ratio lattice would need astronomically large indices.
constexpr std::uint64_t generation_particle_key(std::uint64_t generationKey,
                                                std::uint64_t particleIndex) {
  return generationKey + particleIndex * 0x3c6ef372fe94f82bULL;
}

// Stream key of a child given its parent's key and birth rank. Lineage
// keying keeps a surviving particle's subtree identical no matter which
// of its cousins were pruned.
constexpr std::uint64_t child_key(std::uint64_t parentKey, std::uint64_t j) {
  return mix64(parentKey ^ (0xa0761d6478bd642fULL * (j + 1)));
}

}  // namespace brw
