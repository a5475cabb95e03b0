#pragma once

#include <utility>
#include <vector>

#include "ghzcs/circuit.hpp"

namespace ghzcs {

// Qubits a single ZZ check can herald: both LCA paths, ancestor counted once.
struct CoverageSet {
  std::pair<int, int> pair;
  std::vector<int> covered; // sorted ascending
  double ratio = 0.0;       // |covered| / n
};

struct FlagPlan {
  std::vector<std::pair<int, int>> pairs; // selection order
  std::vector<int> union_covered;         // sorted ascending
  double total_ratio = 0.0;
  std::vector<int> marginal_gains; // one per selected pair, non-increasing
};

// Deepest common ancestor of i and j, following the CNOTs backwards.
int lca(const PrepTree& tree, int i, int j);

CoverageSet coverage_set(const PrepTree& tree, int i, int j);

// Greedy max-coverage over all unordered data-qubit pairs. Ties go to the
// lexicographically smallest (i, j); selection stops early once the best
// marginal gain drops to zero.
FlagPlan greedy_flag_placement(const PrepTree& tree, int k);

// Exhaustive optimum over all k-subsets of pairs; only for n <= 16, k <= 3.
// Ties are broken by lexicographic pair-list order. The returned pairs are
// listed in within-subset greedy order so the gains are non-increasing.
FlagPlan brute_force_optimal(const PrepTree& tree, int k);

} // namespace ghzcs
