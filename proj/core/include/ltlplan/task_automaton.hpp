#pragma once

// Planner-side view of the DFA: infeasible-symbol pruning, the hop-count
// distance function, the one-hop-closer candidate set R(q), and seeded
// sub-task selection with exhaustion bookkeeping for the assistance cascade.

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ltlplan/automaton.hpp"

namespace ltlplan {

inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();

struct PrunedDfa {
  Dfa base;
  std::vector<Symbol> infeasible_symbols;  // every sigma with |sigma| >= 2, sorted
  // feasible[q][q2]: sorted feasible symbols sigma (|sigma| <= 1) with
  // delta(q, sigma) = q2. Empty vector when no feasible edge exists.
  std::vector<std::vector<std::vector<Symbol>>> feasible;
  // dist[q][q2]: shortest pruned-path hop count, kInfiniteDistance if none.
  std::vector<std::vector<int>> dist;
};

struct MissionState {
  int current = 0;
  int time = 0;
  std::uint64_t rng_seed = 0;
  // AP indices already tried and abandoned, per feasible transition.
  std::map<std::pair<int, int>, std::set<int>> exhausted_aps;
  // States already abandoned from R(current).
  std::set<int> exhausted_targets;
};

struct SubtaskAssignment {
  int next_state = 0;
  int next_ap_index = -1;          // index into ap_set
  AtomicProposition next_ap;
  std::vector<int> loop_ap_indices;       // APs that may hold while looping
  std::vector<int> forbidden_ap_indices;  // APs that must not become true yet
  std::vector<AtomicProposition> forbidden_aps;  // parallel to the indices
};

struct ReachableSet {
  std::vector<int> states;  // sorted
  bool all_exhausted = false;  // true when only exhaustion emptied the set
};

struct NoProgressError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSubtaskError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleSymbolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PrunedDfa prune(const Dfa& dfa);

// Shortest pruned-path hop count from q to q2 (kInfiniteDistance if none).
int distance(const PrunedDfa& pruned, int q, int q2);

// R(q_D(t)) = { q' != q : d(q', q_F) = d(q, q_F) - 1 } minus exhausted
// targets. Empty at the accepting state; throws NoProgress when the mission
// is infeasible (d = infinity) rather than merely exhausted.
ReachableSet reachable_next(const PrunedDfa& pruned, const MissionState& state);

// Picks q_next uniformly among reachable states that still have candidate
// APs, then pi_next uniformly among those APs; deterministic in
// (rng_seed, current, time). Throws NoSubtask when everything is exhausted.
SubtaskAssignment select_subtask(const PrunedDfa& pruned,
                                 const MissionState& state);

// delta-steps the mission state on a feasible symbol; exhaustion sets reset.
MissionState advance(const PrunedDfa& pruned, const MissionState& state,
                     Symbol word_symbol);

// Debug dump: distance table and feasible-symbol sets as JSON text.
std::string pruned_to_json(const PrunedDfa& pruned);

}  // namespace ltlplan
