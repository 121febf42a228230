#pragma once

// Co-safe LTL over natural-language sub-task propositions: abstract syntax,
// negation-normal-form parser, and the per-formula AP table that fixes the
// bit layout of alphabet symbols (2^AP as bitmasks).

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltlplan {

enum class ApAction { Deliver, Move, Bring };

std::string to_string(ApAction action);
ApAction ap_action_from_string(const std::string& text);

// One atomic proposition: a Boolean that becomes true when the rendered
// sub-task ("deliver C1 to LC") is semantically accomplished in the world.
struct AtomicProposition {
  int id = 0;                // referenced from formula text as p<id>
  ApAction action = ApAction::Move;
  std::string target;        // object id, class label, or synonym descriptor
  std::string destination;   // location id
  std::string nl_text;       // deterministic "[action] [target] to [destination]"
};

// Builds an AP and renders nl_text from the (action, target, destination) triple.
AtomicProposition make_ap(int id, ApAction action, std::string target,
                          std::string destination);

enum class FormulaKind { True, Atom, And, Or, Not, Next, Until, Eventually };

struct FormulaNode;
using FormulaPtr = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  FormulaKind kind = FormulaKind::True;
  int atom_index = -1;  // index into Formula::ap_set when kind == Atom
  FormulaPtr lhs;       // operand (unary ops use lhs only)
  FormulaPtr rhs;
};

// Parsed co-safe formula in negation normal form. ap_set is ordered by AP id
// and contains exactly the propositions referenced by root; bit i of an
// alphabet symbol corresponds to ap_set[i].
struct Formula {
  FormulaPtr root;
  std::vector<AtomicProposition> ap_set;
};

// Node constructors for building formulas programmatically (tests, suites).
FormulaPtr f_true();
FormulaPtr f_atom(int atom_index);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_next(FormulaPtr a);
FormulaPtr f_until(FormulaPtr a, FormulaPtr b);
FormulaPtr f_eventually(FormulaPtr a);

struct LtlSyntaxError : std::runtime_error {
  LtlSyntaxError(const std::string& what, std::size_t offset);
  std::size_t offset;  // byte offset into the formula text
};

struct NonCoSafeError : std::runtime_error {
  NonCoSafeError(const std::string& what, std::size_t offset);
  std::size_t offset;
};

struct UnknownAtomError : std::runtime_error {
  UnknownAtomError(const std::string& what, std::size_t offset, int id);
  std::size_t offset;
  int id;
};

// Parses the concrete syntax (`&`, `|`, `!`, `X`, `U`, `F`, `true`, atoms as
// `p<id>`) and normalizes to NNF. `G` and negation of temporal subformulas
// raise NonCoSafeError; unknown p<id> raises UnknownAtomError.
Formula parse_ltl(const std::string& text,
                  const std::vector<AtomicProposition>& atoms);

// Infix rendering of a formula (for DOT labels, traces, debugging).
std::string to_string(const Formula& formula);
std::string to_string(const FormulaPtr& node,
                      const std::vector<AtomicProposition>& ap_set);

}  // namespace ltlplan
