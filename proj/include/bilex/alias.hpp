#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bilex/rng.hpp"

namespace bilex {

// Walker alias table over a finite set of outcomes.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  const std::vector<double>& prob() const { return prob_; }
  const std::vector<std::uint32_t>& alias() const { return alias_; }

  // One 64-bit draw: high half picks the cell, low half the coin.
  std::uint32_t sample(std::uint64_t bits) const {
    const auto n = static_cast<std::uint64_t>(prob_.size());
    const auto cell = static_cast<std::uint32_t>(((bits >> 32) * n) >> 32);
    const double coin = static_cast<double>(bits & 0xffffffffu) * 0x1.0p-32;
    return coin < prob_[cell] ? cell : alias_[cell];
  }
  std::uint32_t sample(Rng& rng) const { return sample(rng()); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

// Fills `prob`/`alias` (length = weights.size()) with the two-stack Walker
// construction on weights scaled to mean 1.
void build_alias_cells(std::span<const double> weights, std::span<double> prob,
                       std::span<std::uint32_t> alias);

// Exact outcome distribution induced by a table: (prob[i] + sum over cells
// aliased to i of (1 - prob[j])) / n.
std::vector<double> alias_distribution(std::span<const double> prob, std::span<const std::uint32_t> alias);

}  // namespace bilex
