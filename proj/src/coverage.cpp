#include "ghzcs/coverage.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "ghzcs/errors.hpp"

namespace ghzcs {

namespace {

// Dense qubit-set as 64-bit blocks; trees here are small.
using Mask = std::vector<std::uint64_t>;

Mask empty_mask(int n) { return Mask((n + 63) / 64, 0); }

void mask_set(Mask& m, int q) { m[q / 64] |= std::uint64_t{1} << (q % 64); }

int mask_count(const Mask& m) {
  int c = 0;
  for (std::uint64_t b : m) c += std::popcount(b);
  return c;
}

int gain_count(const Mask& candidate, const Mask& base) {
  int c = 0;
  for (std::size_t w = 0; w < candidate.size(); ++w) {
    c += std::popcount(candidate[w] & ~base[w]);
  }
  return c;
}

void mask_or(Mask& into, const Mask& other) {
  for (std::size_t w = 0; w < into.size(); ++w) into[w] |= other[w];
}

std::vector<int> mask_to_sorted(const Mask& m, int n) {
  std::vector<int> out;
  for (int q = 0; q < n; ++q) {
    if (m[q / 64] >> (q % 64) & 1) out.push_back(q);
  }
  return out;
}

void check_qubit(const PrepTree& tree, int q) {
  if (q < 0 || q >= tree.n) {
    throw std::invalid_argument("qubit index " + std::to_string(q) +
                                " out of range for tree of size " +
                                std::to_string(tree.n));
  }
}

Mask coverage_mask(const PrepTree& tree, int i, int j) {
  Mask m = empty_mask(tree.n);
  const int a = lca(tree, i, j);
  for (int q = i; q != a; q = tree.parent[q]) mask_set(m, q);
  for (int q = j; q != a; q = tree.parent[q]) mask_set(m, q);
  mask_set(m, a);
  return m;
}

std::vector<std::pair<int, int>> all_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

} // namespace

int lca(const PrepTree& tree, int i, int j) {
  check_qubit(tree, i);
  check_qubit(tree, j);
  int di = tree.depth(i);
  int dj = tree.depth(j);
  while (di > dj) {
    i = tree.parent[i];
    --di;
  }
  while (dj > di) {
    j = tree.parent[j];
    --dj;
  }
  while (i != j) {
    i = tree.parent[i];
    j = tree.parent[j];
  }
  return i;
}

CoverageSet coverage_set(const PrepTree& tree, int i, int j) {
  check_qubit(tree, i);
  check_qubit(tree, j);
  if (i == j) throw std::invalid_argument("check pair must be distinct qubits");
  CoverageSet cs;
  cs.pair = {i, j};
  Mask m = coverage_mask(tree, i, j);
  cs.covered = mask_to_sorted(m, tree.n);
  cs.ratio = static_cast<double>(cs.covered.size()) / tree.n;
  return cs;
}

FlagPlan greedy_flag_placement(const PrepTree& tree, int k) {
  if (k < 0) throw std::invalid_argument("flag count must be nonnegative");
  FlagPlan plan;
  const auto pairs = all_pairs(tree.n);
  std::vector<Mask> masks;
  masks.reserve(pairs.size());
  for (auto [i, j] : pairs) masks.push_back(coverage_mask(tree, i, j));

  Mask covered = empty_mask(tree.n);
  std::vector<bool> taken(pairs.size(), false);
  for (int round = 0; round < k; ++round) {
    int best = -1;
    int best_gain = 0;
    // Candidates are in lexicographic order, so a strict comparison keeps
    // the smallest pair on ties.
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      if (taken[c]) continue;
      const int gain = gain_count(masks[c], covered);
      if (gain > best_gain) {
        best_gain = gain;
        best = static_cast<int>(c);
      }
    }
    if (best < 0) break; // nothing left to gain
    taken[best] = true;
    mask_or(covered, masks[best]);
    plan.pairs.push_back(pairs[best]);
    plan.marginal_gains.push_back(best_gain);
  }
  plan.union_covered = mask_to_sorted(covered, tree.n);
  plan.total_ratio = static_cast<double>(plan.union_covered.size()) / tree.n;
  return plan;
}

FlagPlan brute_force_optimal(const PrepTree& tree, int k) {
  if (k < 0) throw std::invalid_argument("flag count must be nonnegative");
  if (tree.n > 16 || k > 3) {
    throw ResourceLimitError("brute-force optimum limited to n <= 16, k <= 3");
  }
  const auto pairs = all_pairs(tree.n);
  std::vector<Mask> masks;
  masks.reserve(pairs.size());
  for (auto [i, j] : pairs) masks.push_back(coverage_mask(tree, i, j));

  k = std::min<int>(k, static_cast<int>(pairs.size()));
  std::vector<int> best_subset;
  int best_size = -1;

  std::vector<int> subset(k);
  auto descend = [&](auto&& self, int pos, int start, Mask acc) -> void {
    if (pos == k) {
      const int size = mask_count(acc);
      if (size > best_size) { // first lexicographic subset wins ties
        best_size = size;
        best_subset = subset;
      }
      return;
    }
    for (int c = start; c < static_cast<int>(pairs.size()); ++c) {
      subset[pos] = c;
      Mask next = acc;
      mask_or(next, masks[c]);
      self(self, pos + 1, c + 1, std::move(next));
    }
  };
  descend(descend, 0, 0, empty_mask(tree.n));

  // Reorder the winning subset greedily so the reported gains are
  // non-increasing, like every other plan.
  FlagPlan plan;
  Mask covered = empty_mask(tree.n);
  std::vector<int> remaining = best_subset;
  while (!remaining.empty()) {
    std::size_t best_at = 0;
    int best_gain = -1;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      const int gain = gain_count(masks[remaining[r]], covered);
      if (gain > best_gain) {
        best_gain = gain;
        best_at = r;
      }
    }
    const int c = remaining[best_at];
    remaining.erase(remaining.begin() + static_cast<long>(best_at));
    plan.pairs.push_back(pairs[c]);
    plan.marginal_gains.push_back(best_gain);
    mask_or(covered, masks[c]);
  }
  plan.union_covered = mask_to_sorted(covered, tree.n);
  plan.total_ratio = static_cast<double>(plan.union_covered.size()) / tree.n;
  return plan;
}

} // namespace ghzcs
