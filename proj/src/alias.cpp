#include "bilex/alias.hpp"

#include <numeric>

#include "bilex/error.hpp"

namespace bilex {

void build_alias_cells(std::span<const double> weights, std::span<double> prob,
                       std::span<std::uint32_t> alias) {
  const std::size_t n = weights.size();
  if (n == 0) throw ParameterError("alias table needs at least one outcome");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ParameterError("alias table weights must have a positive sum");

  std::vector<std::uint32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0) throw ParameterError("alias table weights must be non-negative");
    prob[i] = weights[i] * static_cast<double>(n) / total;
    alias[i] = static_cast<std::uint32_t>(i);
    (prob[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    alias[s] = l;
    prob[l] -= 1.0 - prob[s];
    if (prob[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // leftovers are 1 up to rounding
  for (auto i : small) prob[i] = 1.0;
  for (auto i : large) prob[i] = 1.0;
}

AliasTable::AliasTable(std::span<const double> weights)
    : prob_(weights.size()), alias_(weights.size()) {
  build_alias_cells(weights, prob_, alias_);
}

std::vector<double> alias_distribution(std::span<const double> prob, std::span<const std::uint32_t> alias) {
  const std::size_t n = prob.size();
  std::vector<double> dist(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    dist[j] += prob[j];
    if (prob[j] < 1.0) dist[alias[j]] += 1.0 - prob[j];
  }
  for (auto& d : dist) d /= static_cast<double>(n);
  return dist;
}

}  // namespace bilex
