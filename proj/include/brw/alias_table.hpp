#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "brw/rng.hpp"

namespace brw {

// Walker/Vose alias table for O(1) sampling from a finite pmf.
// Consumes one 64-bit draw per sample: the high part selects the bucket
// (Lemire multiply-shift), the low part is the accept/alias coin.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty pmf");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("AliasTable: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("AliasTable: zero pmf");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i)
      scaled[i] = weights[i] * static_cast<double>(n) / total;
    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      small.pop_back();
      const std::uint32_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;
  }

  bool empty() const { return prob_.empty(); }
  std::size_t size() const { return prob_.size(); }

  std::uint32_t sample(StreamRng& rng) const {
    const std::uint64_t u = rng.next_u64();
    const std::size_t n = prob_.size();
    const std::uint64_t idx =
        static_cast<std::uint64_t>((static_cast<unsigned __int128>(u) * n) >> 64);
    const std::uint64_t low = u * static_cast<std::uint64_t>(n);
    const double coin = static_cast<double>(low >> 11) * 0x1.0p-53;
    return coin < prob_[idx] ? static_cast<std::uint32_t>(idx) : alias_[idx];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace brw
