#pragma once

// LTLf -> minimal DFA compilation via formula progression over 2^AP,
// followed by Hopcroft partition refinement. Co-safe acceptance collapses
// to a single absorbing accepting state by construction.

#include <cstdint>
#include <string>
#include <vector>

#include "ltlplan/ltl.hpp"

namespace ltlplan {

// One alphabet element: bitmask over Formula::ap_set (bit i <-> ap_set[i]).
using Symbol = std::uint32_t;

struct Dfa {
  std::vector<AtomicProposition> ap_set;
  int num_aps = 0;      // alphabet size is 1 << num_aps
  int num_states = 0;
  int initial = 0;
  int accepting = 0;    // single absorbing accepting state
  bool satisfiable = true;  // accepting reachable from initial
  // Row-major total transition table: next[state * (1<<num_aps) + symbol].
  std::vector<int> next;

  int alphabet_size() const { return 1 << num_aps; }
  int step(int state, Symbol symbol) const {
    return next[static_cast<std::size_t>(state) * alphabet_size() + symbol];
  }
  // Runs a finite word from the initial state; true iff it ends accepting.
  bool accepts(const std::vector<Symbol>& word) const;
};

// Compiles a co-safe formula to its minimal total DFA under finite-trace
// semantics. An unsatisfiable formula is returned with satisfiable = false
// (accepting state present but unreachable), never thrown.
Dfa to_dfa(const Formula& formula);

// Number of distinct (source, target) transition pairs, counting each pair
// once regardless of how many symbols enable it.
int edge_count(const Dfa& dfa);

// GraphViz DOT text. States that cannot reach the accepting state are
// omitted (matching the usual figure style of drawing co-safe automata
// without their trap state); output ordering is deterministic.
std::string export_dot(const Dfa& dfa);

// Renders a symbol as "{}" or "{p1 p2}" using AP ids from ap_set.
std::string symbol_to_string(Symbol symbol,
                             const std::vector<AtomicProposition>& ap_set);

}  // namespace ltlplan
