#include "ltlplan/task_automaton.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <random>

#include "json.hpp"

namespace ltlplan {

namespace {

// splitmix64; decorrelates the (seed, state, time) triple before seeding the
// selection RNG so nearby times do not produce nearby draws.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<int> candidate_aps(const PrunedDfa& pruned, int from, int to) {
  std::vector<int> aps;
  for (Symbol sigma : pruned.feasible[from][to]) {
    if (std::popcount(sigma) == 1) {
      aps.push_back(std::countr_zero(sigma));
    }
  }
  return aps;
}

}  // namespace

PrunedDfa prune(const Dfa& dfa) {
  PrunedDfa pruned;
  pruned.base = dfa;
  const int n = dfa.num_states;
  const int alphabet = dfa.alphabet_size();

  for (Symbol sigma = 0; sigma < static_cast<Symbol>(alphabet); ++sigma) {
    if (std::popcount(sigma) >= 2) pruned.infeasible_symbols.push_back(sigma);
  }

  pruned.feasible.assign(n, std::vector<std::vector<Symbol>>(n));
  for (int q = 0; q < n; ++q) {
    for (Symbol sigma = 0; sigma < static_cast<Symbol>(alphabet); ++sigma) {
      if (std::popcount(sigma) >= 2) continue;
      pruned.feasible[q][dfa.step(q, sigma)].push_back(sigma);
    }
  }

  // Unit-weight BFS over the pruned transition graph, one source at a time.
  pruned.dist.assign(n, std::vector<int>(n, kInfiniteDistance));
  for (int q = 0; q < n; ++q) {
    auto& row = pruned.dist[q];
    row[q] = 0;
    std::deque<int> frontier{q};
    while (!frontier.empty()) {
      int u = frontier.front();
      frontier.pop_front();
      for (int v = 0; v < n; ++v) {
        if (pruned.feasible[u][v].empty() || row[v] != kInfiniteDistance) {
          continue;
        }
        if (v != u) {
          row[v] = row[u] + 1;
          frontier.push_back(v);
        }
      }
    }
  }
  return pruned;
}

int distance(const PrunedDfa& pruned, int q, int q2) {
  return pruned.dist.at(q).at(q2);
}

ReachableSet reachable_next(const PrunedDfa& pruned,
                            const MissionState& state) {
  ReachableSet result;
  const int accepting = pruned.base.accepting;
  const int q = state.current;
  if (q == accepting) return result;

  int d = pruned.dist[q][accepting];
  if (d == kInfiniteDistance) {
    throw NoProgressError("accepting state unreachable from q" +
                          std::to_string(q));
  }
  bool had_any = false;
  for (int q2 = 0; q2 < pruned.base.num_states; ++q2) {
    if (q2 == q || pruned.feasible[q][q2].empty()) continue;
    if (pruned.dist[q2][accepting] != d - 1) continue;
    had_any = true;
    if (state.exhausted_targets.count(q2)) continue;
    result.states.push_back(q2);
  }
  result.all_exhausted = had_any && result.states.empty();
  return result;
}

SubtaskAssignment select_subtask(const PrunedDfa& pruned,
                                 const MissionState& state) {
  ReachableSet reachable = reachable_next(pruned, state);
  if (reachable.states.empty()) {
    throw NoSubtaskError(reachable.all_exhausted
                             ? "all reachable states exhausted"
                             : "no sub-task available at q" +
                                   std::to_string(state.current));
  }

  // States that still offer a non-exhausted AP; sub-tasks are APs, so a
  // state reachable only via the empty symbol is never assignable.
  std::vector<std::pair<int, std::vector<int>>> eligible;
  for (int q2 : reachable.states) {
    std::vector<int> aps = candidate_aps(pruned, state.current, q2);
    auto it = state.exhausted_aps.find({state.current, q2});
    if (it != state.exhausted_aps.end()) {
      std::erase_if(aps, [&](int ap) { return it->second.count(ap) > 0; });
    }
    if (!aps.empty()) eligible.emplace_back(q2, std::move(aps));
  }
  if (eligible.empty()) {
    throw NoSubtaskError("every candidate sub-task is exhausted at q" +
                         std::to_string(state.current));
  }

  std::uint64_t seed = mix(state.rng_seed ^
                           mix(static_cast<std::uint64_t>(state.current) << 32 |
                               static_cast<std::uint32_t>(state.time)));
  std::mt19937_64 rng(seed);
  const auto& [next_state, aps] =
      eligible[std::uniform_int_distribution<std::size_t>(
          0, eligible.size() - 1)(rng)];
  int next_ap_index = aps[std::uniform_int_distribution<std::size_t>(
      0, aps.size() - 1)(rng)];

  SubtaskAssignment assignment;
  assignment.next_state = next_state;
  assignment.next_ap_index = next_ap_index;
  assignment.next_ap = pruned.base.ap_set[next_ap_index];
  assignment.loop_ap_indices =
      candidate_aps(pruned, state.current, state.current);
  for (int i = 0; i < pruned.base.num_aps; ++i) {
    int target = pruned.base.step(state.current, Symbol{1} << i);
    if (target != state.current && target != next_state) {
      assignment.forbidden_ap_indices.push_back(i);
      assignment.forbidden_aps.push_back(pruned.base.ap_set[i]);
    }
  }
  return assignment;
}

MissionState advance(const PrunedDfa& pruned, const MissionState& state,
                     Symbol word_symbol) {
  if (std::popcount(word_symbol) >= 2) {
    throw InfeasibleSymbolError(
        "symbol " + symbol_to_string(word_symbol, pruned.base.ap_set) +
        " accomplishes more than one sub-task");
  }
  MissionState out;
  out.current = pruned.base.step(state.current, word_symbol);
  out.time = state.time + 1;
  out.rng_seed = state.rng_seed;
  return out;
}

std::string pruned_to_json(const PrunedDfa& pruned) {
  nlohmann::ordered_json j;
  j["num_states"] = pruned.base.num_states;
  j["accepting"] = pruned.base.accepting;
  j["infeasible_symbols"] = nlohmann::ordered_json::array();
  for (Symbol sigma : pruned.infeasible_symbols) {
    j["infeasible_symbols"].push_back(
        symbol_to_string(sigma, pruned.base.ap_set));
  }
  auto& feasible = j["feasible"] = nlohmann::ordered_json::object();
  for (int q = 0; q < pruned.base.num_states; ++q) {
    for (int q2 = 0; q2 < pruned.base.num_states; ++q2) {
      if (pruned.feasible[q][q2].empty()) continue;
      std::string key = "q" + std::to_string(q) + "->q" + std::to_string(q2);
      auto& list = feasible[key] = nlohmann::ordered_json::array();
      for (Symbol sigma : pruned.feasible[q][q2]) {
        list.push_back(symbol_to_string(sigma, pruned.base.ap_set));
      }
    }
  }
  auto& dist = j["distance"] = nlohmann::ordered_json::array();
  for (int q = 0; q < pruned.base.num_states; ++q) {
    auto row = nlohmann::ordered_json::array();
    for (int q2 = 0; q2 < pruned.base.num_states; ++q2) {
      if (pruned.dist[q][q2] == kInfiniteDistance) {
        row.push_back(nullptr);
      } else {
        row.push_back(pruned.dist[q][q2]);
      }
    }
    dist.push_back(std::move(row));
  }
  return j.dump(2);
}

}  // namespace ltlplan
