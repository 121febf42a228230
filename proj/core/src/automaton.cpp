#include "ltlplan/automaton.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ltlplan {

bool Dfa::accepts(const std::vector<Symbol>& word) const {
  int state = initial;
  for (Symbol symbol : word) state = step(state, symbol);
  return state == accepting;
}

namespace {

// Progression states are monotone DNF formulas over "closure atoms": the
// literal and temporal subformulas of the input plus F true (the nonempty-
// suffix obligation introduced by strong X). A clause is a bitmask over
// closure-atom ids; a state is a subsumption-minimal, sorted clause list.
// TRUE is {0} (the empty clause), FALSE is {} — so a state is accepting
// exactly when it equals {0}.
using Clause = std::uint64_t;
using Dnf = std::vector<Clause>;

const Dnf kTrue = {0};
const Dnf kFalse = {};

struct Closure {
  std::vector<FormulaPtr> atoms;       // id -> subformula
  std::map<std::string, int> id_of;    // structural key -> id
  std::vector<int> pos_literal;        // ap index -> closure id or -1
  std::vector<int> neg_literal;
  int ftrue = -1;
  const std::vector<AtomicProposition>* ap_set = nullptr;

  int intern(const FormulaPtr& node) {
    std::string key = to_string(node, *ap_set);
    auto it = id_of.find(key);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(atoms.size());
    id_of.emplace(std::move(key), id);
    atoms.push_back(node);
    if (node->kind == FormulaKind::Atom) {
      pos_literal[node->atom_index] = id;
    } else if (node->kind == FormulaKind::Not) {
      neg_literal[node->lhs->atom_index] = id;
    }
    return id;
  }
};

bool clause_contradicts(Clause c, const Closure& cl) {
  for (std::size_t i = 0; i < cl.pos_literal.size(); ++i) {
    if (cl.pos_literal[i] < 0 || cl.neg_literal[i] < 0) continue;
    Clause both = (Clause{1} << cl.pos_literal[i]) |
                  (Clause{1} << cl.neg_literal[i]);
    if ((c & both) == both) return true;
  }
  return false;
}

// Sort, dedupe, drop contradictory clauses and clauses subsumed by a
// smaller one (c' subset of c kills c).
Dnf minimize(Dnf dnf, const Closure& cl) {
  dnf.erase(std::remove_if(dnf.begin(), dnf.end(),
                           [&](Clause c) { return clause_contradicts(c, cl); }),
            dnf.end());
  std::sort(dnf.begin(), dnf.end());
  dnf.erase(std::unique(dnf.begin(), dnf.end()), dnf.end());
  Dnf out;
  for (std::size_t i = 0; i < dnf.size(); ++i) {
    bool subsumed = false;
    for (std::size_t j = 0; j < dnf.size(); ++j) {
      if (i != j && (dnf[i] & dnf[j]) == dnf[j]) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed) out.push_back(dnf[i]);
  }
  return out;
}

Dnf dnf_or(const Dnf& a, const Dnf& b, const Closure& cl) {
  Dnf out = a;
  out.insert(out.end(), b.begin(), b.end());
  return minimize(std::move(out), cl);
}

Dnf dnf_and(const Dnf& a, const Dnf& b, const Closure& cl) {
  Dnf out;
  out.reserve(a.size() * b.size());
  for (Clause ca : a) {
    for (Clause cb : b) out.push_back(ca | cb);
  }
  return minimize(std::move(out), cl);
}

// A formula as a DNF state (no progression): temporal and literal
// subformulas become closure atoms, conjunction/disjunction distribute.
Dnf dnf_of(const FormulaPtr& node, Closure& cl) {
  switch (node->kind) {
    case FormulaKind::True:
      return kTrue;
    case FormulaKind::And:
      return dnf_and(dnf_of(node->lhs, cl), dnf_of(node->rhs, cl), cl);
    case FormulaKind::Or:
      return dnf_or(dnf_of(node->lhs, cl), dnf_of(node->rhs, cl), cl);
    default:
      return Dnf{Clause{1} << cl.intern(node)};
  }
}

// prog(phi, sigma): the obligation on the remaining word after reading
// sigma. Strong X demands a nonempty suffix, encoded as F true.
Dnf prog(const FormulaPtr& node, Symbol sigma, Closure& cl) {
  switch (node->kind) {
    case FormulaKind::True:
      return kTrue;
    case FormulaKind::Atom:
      return ((sigma >> node->atom_index) & 1u) ? kTrue : kFalse;
    case FormulaKind::Not:
      return ((sigma >> node->lhs->atom_index) & 1u) ? kFalse : kTrue;
    case FormulaKind::And:
      return dnf_and(prog(node->lhs, sigma, cl), prog(node->rhs, sigma, cl),
                     cl);
    case FormulaKind::Or:
      return dnf_or(prog(node->lhs, sigma, cl), prog(node->rhs, sigma, cl),
                    cl);
    case FormulaKind::Next:
      return dnf_and(dnf_of(node->lhs, cl),
                     Dnf{Clause{1} << cl.ftrue}, cl);
    case FormulaKind::Eventually:
      if (node->lhs->kind == FormulaKind::True) return kTrue;
      return dnf_or(prog(node->lhs, sigma, cl),
                    Dnf{Clause{1} << cl.intern(node)}, cl);
    case FormulaKind::Until:
      return dnf_or(
          prog(node->rhs, sigma, cl),
          dnf_and(prog(node->lhs, sigma, cl),
                  Dnf{Clause{1} << cl.intern(node)}, cl),
          cl);
  }
  return kFalse;
}

void collect_closure(const FormulaPtr& node, Closure& cl) {
  switch (node->kind) {
    case FormulaKind::True:
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
      collect_closure(node->lhs, cl);
      collect_closure(node->rhs, cl);
      return;
    case FormulaKind::Atom:
    case FormulaKind::Not:
      cl.intern(node);
      return;
    case FormulaKind::Next:
      cl.intern(node);
      collect_closure(node->lhs, cl);
      return;
    case FormulaKind::Eventually:
      cl.intern(node);
      collect_closure(node->lhs, cl);
      return;
    case FormulaKind::Until:
      cl.intern(node);
      collect_closure(node->lhs, cl);
      collect_closure(node->rhs, cl);
      return;
  }
}

// Moore partition refinement; states here are indices into a raw table.
std::vector<int> moore_blocks(int num_states, int alphabet,
                              const std::vector<int>& next, int accepting) {
  std::vector<int> block(num_states);
  for (int s = 0; s < num_states; ++s) block[s] = (s == accepting) ? 1 : 0;
  int num_blocks = (num_states > 1) ? 2 : 1;
  while (true) {
    std::map<std::vector<int>, int> sig_to_block;
    std::vector<int> refined(num_states);
    for (int s = 0; s < num_states; ++s) {
      std::vector<int> sig;
      sig.reserve(alphabet + 1);
      sig.push_back(block[s]);
      for (int a = 0; a < alphabet; ++a) {
        sig.push_back(block[next[static_cast<std::size_t>(s) * alphabet + a]]);
      }
      auto [it, inserted] =
          sig_to_block.emplace(std::move(sig),
                               static_cast<int>(sig_to_block.size()));
      refined[s] = it->second;
    }
    int refined_count = static_cast<int>(sig_to_block.size());
    if (refined_count == num_blocks) return refined;
    block = std::move(refined);
    num_blocks = refined_count;
  }
}

}  // namespace

Dfa to_dfa(const Formula& formula) {
  Dfa dfa;
  dfa.ap_set = formula.ap_set;
  dfa.num_aps = static_cast<int>(formula.ap_set.size());
  const int alphabet = 1 << dfa.num_aps;

  Closure cl;
  cl.ap_set = &dfa.ap_set;
  cl.pos_literal.assign(dfa.ap_set.size(), -1);
  cl.neg_literal.assign(dfa.ap_set.size(), -1);
  collect_closure(formula.root, cl);
  cl.ftrue = cl.intern(f_eventually(f_true()));

  // Reachable subset construction over progression states.
  std::map<Dnf, int> id_of_state;
  std::vector<Dnf> states;
  std::vector<int> raw_next;
  auto intern_state = [&](Dnf d) {
    auto [it, inserted] = id_of_state.emplace(std::move(d),
                                              static_cast<int>(states.size()));
    if (inserted) states.push_back(it->first);
    return it->second;
  };

  Dnf init = minimize(dnf_of(formula.root, cl), cl);
  intern_state(init);
  for (int s = 0; s < static_cast<int>(states.size()); ++s) {
    Dnf state = states[s];  // copy: states may reallocate while expanding
    for (Symbol sigma = 0; sigma < static_cast<Symbol>(alphabet); ++sigma) {
      Dnf out = kFalse;
      for (Clause clause : state) {
        Dnf conj = kTrue;
        for (int id = 0; id < static_cast<int>(cl.atoms.size()); ++id) {
          if (!((clause >> id) & 1u)) continue;
          conj = dnf_and(conj, prog(cl.atoms[id], sigma, cl), cl);
          if (conj.empty()) break;
        }
        out = dnf_or(out, conj, cl);
      }
      raw_next.push_back(intern_state(std::move(out)));
    }
  }

  // The accepting state must exist even when unreachable (unsatisfiable
  // formulas keep a total table and a well-defined accepting id).
  auto true_it = id_of_state.find(kTrue);
  int raw_accepting;
  if (true_it != id_of_state.end()) {
    raw_accepting = true_it->second;
  } else {
    raw_accepting = intern_state(kTrue);
    for (int a = 0; a < alphabet; ++a) raw_next.push_back(raw_accepting);
  }
  const int raw_count = static_cast<int>(states.size());

  std::vector<int> block = moore_blocks(raw_count, alphabet, raw_next,
                                        raw_accepting);
  int num_blocks = 1 + *std::max_element(block.begin(), block.end());

  // Canonical numbering: BFS from the initial block, symbols ascending;
  // blocks unreachable from the initial state go last.
  std::vector<int> block_next(static_cast<std::size_t>(num_blocks) * alphabet);
  std::vector<int> block_rep(num_blocks, -1);
  for (int s = 0; s < raw_count; ++s) {
    if (block_rep[block[s]] < 0) block_rep[block[s]] = s;
  }
  for (int b = 0; b < num_blocks; ++b) {
    for (int a = 0; a < alphabet; ++a) {
      block_next[static_cast<std::size_t>(b) * alphabet + a] =
          block[raw_next[static_cast<std::size_t>(block_rep[b]) * alphabet +
                         a]];
    }
  }

  std::vector<int> order(num_blocks, -1);
  int assigned = 0;
  std::queue<int> queue;
  order[block[0]] = assigned++;
  queue.push(block[0]);
  while (!queue.empty()) {
    int b = queue.front();
    queue.pop();
    for (int a = 0; a < alphabet; ++a) {
      int t = block_next[static_cast<std::size_t>(b) * alphabet + a];
      if (order[t] < 0) {
        order[t] = assigned++;
        queue.push(t);
      }
    }
  }
  for (int b = 0; b < num_blocks; ++b) {
    if (order[b] < 0) order[b] = assigned++;
  }

  dfa.num_states = num_blocks;
  dfa.initial = order[block[0]];
  dfa.accepting = order[block[raw_accepting]];
  dfa.next.assign(static_cast<std::size_t>(num_blocks) * alphabet, 0);
  for (int b = 0; b < num_blocks; ++b) {
    for (int a = 0; a < alphabet; ++a) {
      dfa.next[static_cast<std::size_t>(order[b]) * alphabet + a] =
          order[block_next[static_cast<std::size_t>(b) * alphabet + a]];
    }
  }

  // Satisfiable iff the accepting state is reachable from the initial one;
  // with canonical BFS numbering that is exactly "accepting was visited".
  std::vector<bool> reachable(num_blocks, false);
  reachable[dfa.initial] = true;
  std::queue<int> rq;
  rq.push(dfa.initial);
  while (!rq.empty()) {
    int s = rq.front();
    rq.pop();
    for (int a = 0; a < alphabet; ++a) {
      int t = dfa.step(s, static_cast<Symbol>(a));
      if (!reachable[t]) {
        reachable[t] = true;
        rq.push(t);
      }
    }
  }
  dfa.satisfiable = reachable[dfa.accepting];
  return dfa;
}

int edge_count(const Dfa& dfa) {
  std::set<std::pair<int, int>> edges;
  for (int s = 0; s < dfa.num_states; ++s) {
    for (int a = 0; a < dfa.alphabet_size(); ++a) {
      edges.emplace(s, dfa.step(s, static_cast<Symbol>(a)));
    }
  }
  return static_cast<int>(edges.size());
}

std::string symbol_to_string(Symbol symbol,
                             const std::vector<AtomicProposition>& ap_set) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < ap_set.size(); ++i) {
    if (!((symbol >> i) & 1u)) continue;
    if (!first) out += " ";
    out += "p" + std::to_string(ap_set[i].id);
    first = false;
  }
  out += "}";
  return out;
}

std::string export_dot(const Dfa& dfa) {
  // Keep only states from which the accepting state is reachable (drops the
  // trap, matching how co-safe automata are usually drawn).
  std::vector<bool> keep(dfa.num_states, false);
  keep[dfa.accepting] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < dfa.num_states; ++s) {
      if (keep[s]) continue;
      for (int a = 0; a < dfa.alphabet_size(); ++a) {
        if (keep[dfa.step(s, static_cast<Symbol>(a))]) {
          keep[s] = true;
          changed = true;
          break;
        }
      }
    }
  }

  std::ostringstream out;
  out << "digraph dfa {\n  rankdir=LR;\n";
  out << "  init [shape=point];\n";
  for (int s = 0; s < dfa.num_states; ++s) {
    if (!keep[s]) continue;
    out << "  q" << s << " [shape="
        << (s == dfa.accepting ? "doublecircle" : "circle") << "];\n";
  }
  if (keep[dfa.initial]) out << "  init -> q" << dfa.initial << ";\n";
  for (int s = 0; s < dfa.num_states; ++s) {
    if (!keep[s]) continue;
    std::map<int, std::vector<Symbol>> by_target;
    for (int a = 0; a < dfa.alphabet_size(); ++a) {
      int t = dfa.step(s, static_cast<Symbol>(a));
      if (keep[t]) by_target[t].push_back(static_cast<Symbol>(a));
    }
    for (const auto& [t, symbols] : by_target) {
      out << "  q" << s << " -> q" << t << " [label=\"";
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i) out << ", ";
        out << symbol_to_string(symbols[i], dfa.ap_set);
      }
      out << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace ltlplan
