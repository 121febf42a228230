#include "ltlplan/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <utility>

namespace ltlplan {

std::string to_string(ApAction action) {
  switch (action) {
    case ApAction::Deliver: return "deliver";
    case ApAction::Move: return "move";
    case ApAction::Bring: return "bring";
  }
  return "move";
}

ApAction ap_action_from_string(const std::string& text) {
  if (text == "deliver") return ApAction::Deliver;
  if (text == "move") return ApAction::Move;
  if (text == "bring") return ApAction::Bring;
  throw std::invalid_argument("unknown AP action: " + text);
}

AtomicProposition make_ap(int id, ApAction action, std::string target,
                          std::string destination) {
  AtomicProposition ap;
  ap.id = id;
  ap.action = action;
  ap.target = std::move(target);
  ap.destination = std::move(destination);
  ap.nl_text =
      to_string(action) + " " + ap.target + " to " + ap.destination;
  return ap;
}

FormulaPtr f_true() {
  auto node = std::make_shared<FormulaNode>();
  node->kind = FormulaKind::True;
  return node;
}

namespace {

FormulaPtr make_node(FormulaKind kind, FormulaPtr lhs = nullptr,
                     FormulaPtr rhs = nullptr) {
  auto node = std::make_shared<FormulaNode>();
  node->kind = kind;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

}  // namespace

FormulaPtr f_atom(int atom_index) {
  auto node = std::make_shared<FormulaNode>();
  node->kind = FormulaKind::Atom;
  node->atom_index = atom_index;
  return node;
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  return make_node(FormulaKind::And, std::move(a), std::move(b));
}
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  return make_node(FormulaKind::Or, std::move(a), std::move(b));
}
FormulaPtr f_not(FormulaPtr a) {
  return make_node(FormulaKind::Not, std::move(a));
}
FormulaPtr f_next(FormulaPtr a) {
  return make_node(FormulaKind::Next, std::move(a));
}
FormulaPtr f_until(FormulaPtr a, FormulaPtr b) {
  return make_node(FormulaKind::Until, std::move(a), std::move(b));
}
FormulaPtr f_eventually(FormulaPtr a) {
  return make_node(FormulaKind::Eventually, std::move(a));
}

LtlSyntaxError::LtlSyntaxError(const std::string& what, std::size_t offset)
    : std::runtime_error(what), offset(offset) {}
NonCoSafeError::NonCoSafeError(const std::string& what, std::size_t offset)
    : std::runtime_error(what), offset(offset) {}
UnknownAtomError::UnknownAtomError(const std::string& what, std::size_t offset,
                                   int id)
    : std::runtime_error(what), offset(offset), id(id) {}

namespace {

// Raw parse tree prior to NNF; keeps byte offsets for error reporting.
struct RawNode {
  FormulaKind kind = FormulaKind::True;
  int ap_id = -1;  // AP id as written (not yet an ap_set index)
  std::size_t offset = 0;
  std::shared_ptr<RawNode> lhs;
  std::shared_ptr<RawNode> rhs;
};
using RawPtr = std::shared_ptr<RawNode>;

struct Token {
  enum class Kind { Atom, True, And, Or, Not, Next, Until, Finally, Globally,
                    LParen, RParen, End };
  Kind kind = Kind::End;
  int ap_id = -1;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    current_ = Token{};
    current_.offset = pos_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::Kind::End;
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '(': current_.kind = Token::Kind::LParen; ++pos_; return;
      case ')': current_.kind = Token::Kind::RParen; ++pos_; return;
      case '!': current_.kind = Token::Kind::Not; ++pos_; return;
      case '&':
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '&') ++pos_;
        current_.kind = Token::Kind::And;
        return;
      case '|':
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '|') ++pos_;
        current_.kind = Token::Kind::Or;
        return;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      std::string word = text_.substr(start, pos_ - start);
      if (word == "true") { current_.kind = Token::Kind::True; return; }
      if (word == "U") { current_.kind = Token::Kind::Until; return; }
      if (word == "X") { current_.kind = Token::Kind::Next; return; }
      if (word == "F") { current_.kind = Token::Kind::Finally; return; }
      if (word == "G") { current_.kind = Token::Kind::Globally; return; }
      if (word.size() > 1 && word[0] == 'p' &&
          std::all_of(word.begin() + 1, word.end(), [](char d) {
            return std::isdigit(static_cast<unsigned char>(d));
          })) {
        current_.kind = Token::Kind::Atom;
        current_.ap_id = std::stoi(word.substr(1));
        return;
      }
      throw LtlSyntaxError("unexpected token '" + word + "'", start);
    }
    throw LtlSyntaxError(std::string("unexpected character '") + c + "'",
                         pos_);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  Token current_;
};

RawPtr raw_node(FormulaKind kind, std::size_t offset, RawPtr lhs = nullptr,
                RawPtr rhs = nullptr) {
  auto node = std::make_shared<RawNode>();
  node->kind = kind;
  node->offset = offset;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

// Precedence, loosest first: |, &, U, unary. U associates to the right.
class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) {}

  RawPtr parse() {
    RawPtr root = parse_or();
    const Token& t = lexer_.peek();
    if (t.kind != Token::Kind::End) {
      throw LtlSyntaxError("trailing input after formula", t.offset);
    }
    return root;
  }

 private:
  RawPtr parse_or() {
    RawPtr lhs = parse_and();
    while (lexer_.peek().kind == Token::Kind::Or) {
      Token op = lexer_.take();
      lhs = raw_node(FormulaKind::Or, op.offset, lhs, parse_and());
    }
    return lhs;
  }

  RawPtr parse_and() {
    RawPtr lhs = parse_until();
    while (lexer_.peek().kind == Token::Kind::And) {
      Token op = lexer_.take();
      lhs = raw_node(FormulaKind::And, op.offset, lhs, parse_until());
    }
    return lhs;
  }

  RawPtr parse_until() {
    RawPtr lhs = parse_unary();
    if (lexer_.peek().kind == Token::Kind::Until) {
      Token op = lexer_.take();
      return raw_node(FormulaKind::Until, op.offset, lhs, parse_until());
    }
    return lhs;
  }

  RawPtr parse_unary() {
    Token t = lexer_.take();
    switch (t.kind) {
      case Token::Kind::Not:
        return raw_node(FormulaKind::Not, t.offset, parse_unary());
      case Token::Kind::Next:
        return raw_node(FormulaKind::Next, t.offset, parse_unary());
      case Token::Kind::Finally:
        return raw_node(FormulaKind::Eventually, t.offset, parse_unary());
      case Token::Kind::Globally:
        throw NonCoSafeError("G is not co-safe", t.offset);
      case Token::Kind::True:
        return raw_node(FormulaKind::True, t.offset);
      case Token::Kind::Atom: {
        RawPtr node = raw_node(FormulaKind::Atom, t.offset);
        node->ap_id = t.ap_id;
        return node;
      }
      case Token::Kind::LParen: {
        RawPtr inner = parse_or();
        const Token& close = lexer_.peek();
        if (close.kind != Token::Kind::RParen) {
          throw LtlSyntaxError("expected ')'", close.offset);
        }
        lexer_.take();
        return inner;
      }
      case Token::Kind::End:
        throw LtlSyntaxError("unexpected end of formula", t.offset);
      default:
        throw LtlSyntaxError("unexpected token", t.offset);
    }
  }

  Lexer lexer_;
};

void collect_ap_ids(const RawPtr& node, std::vector<int>& ids) {
  if (!node) return;
  if (node->kind == FormulaKind::Atom) ids.push_back(node->ap_id);
  collect_ap_ids(node->lhs, ids);
  collect_ap_ids(node->rhs, ids);
}

// NNF conversion; negation may only reach atoms in a co-safe formula.
FormulaPtr to_nnf(const RawPtr& node, bool negated,
                  const std::map<int, int>& index_of_id) {
  switch (node->kind) {
    case FormulaKind::True:
      if (negated) {
        throw NonCoSafeError("negation of true is not co-safe", node->offset);
      }
      return f_true();
    case FormulaKind::Atom: {
      FormulaPtr atom = f_atom(index_of_id.at(node->ap_id));
      return negated ? f_not(atom) : atom;
    }
    case FormulaKind::Not:
      return to_nnf(node->lhs, !negated, index_of_id);
    case FormulaKind::And: {
      FormulaPtr a = to_nnf(node->lhs, negated, index_of_id);
      FormulaPtr b = to_nnf(node->rhs, negated, index_of_id);
      return negated ? f_or(a, b) : f_and(a, b);
    }
    case FormulaKind::Or: {
      FormulaPtr a = to_nnf(node->lhs, negated, index_of_id);
      FormulaPtr b = to_nnf(node->rhs, negated, index_of_id);
      return negated ? f_and(a, b) : f_or(a, b);
    }
    case FormulaKind::Next:
      if (negated) {
        throw NonCoSafeError("negated X is not co-safe", node->offset);
      }
      return f_next(to_nnf(node->lhs, false, index_of_id));
    case FormulaKind::Until:
      if (negated) {
        throw NonCoSafeError("negated U is not co-safe", node->offset);
      }
      return f_until(to_nnf(node->lhs, false, index_of_id),
                     to_nnf(node->rhs, false, index_of_id));
    case FormulaKind::Eventually:
      if (negated) {
        throw NonCoSafeError("negated F is not co-safe", node->offset);
      }
      return f_eventually(to_nnf(node->lhs, false, index_of_id));
  }
  throw LtlSyntaxError("corrupt parse tree", node->offset);
}

std::size_t first_atom_offset(const RawPtr& node, int ap_id) {
  if (!node) return 0;
  if (node->kind == FormulaKind::Atom && node->ap_id == ap_id) {
    return node->offset;
  }
  if (node->lhs) {
    std::size_t off = first_atom_offset(node->lhs, ap_id);
    if (off != 0 || (node->lhs->kind == FormulaKind::Atom &&
                     node->lhs->ap_id == ap_id)) {
      return off;
    }
  }
  if (node->rhs) return first_atom_offset(node->rhs, ap_id);
  return 0;
}

}  // namespace

Formula parse_ltl(const std::string& text,
                  const std::vector<AtomicProposition>& atoms) {
  Parser parser(text);
  RawPtr raw = parser.parse();

  std::vector<int> ids;
  collect_ap_ids(raw, ids);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  Formula formula;
  std::map<int, int> index_of_id;
  for (int id : ids) {
    auto it = std::find_if(atoms.begin(), atoms.end(),
                           [id](const AtomicProposition& ap) {
                             return ap.id == id;
                           });
    if (it == atoms.end()) {
      throw UnknownAtomError("unknown atomic proposition p" +
                                 std::to_string(id),
                             first_atom_offset(raw, id), id);
    }
    index_of_id[id] = static_cast<int>(formula.ap_set.size());
    formula.ap_set.push_back(*it);
  }
  formula.root = to_nnf(raw, false, index_of_id);
  return formula;
}

std::string to_string(const FormulaPtr& node,
                      const std::vector<AtomicProposition>& ap_set) {
  if (!node) return "";
  switch (node->kind) {
    case FormulaKind::True:
      return "true";
    case FormulaKind::Atom:
      return "p" + std::to_string(ap_set[node->atom_index].id);
    case FormulaKind::Not:
      return "!" + to_string(node->lhs, ap_set);
    case FormulaKind::Next:
      return "X " + to_string(node->lhs, ap_set);
    case FormulaKind::Eventually:
      return "F " + to_string(node->lhs, ap_set);
    case FormulaKind::And:
      return "(" + to_string(node->lhs, ap_set) + " & " +
             to_string(node->rhs, ap_set) + ")";
    case FormulaKind::Or:
      return "(" + to_string(node->lhs, ap_set) + " | " +
             to_string(node->rhs, ap_set) + ")";
    case FormulaKind::Until:
      return "(" + to_string(node->lhs, ap_set) + " U " +
             to_string(node->rhs, ap_set) + ")";
  }
  return "";
}

std::string to_string(const Formula& formula) {
  return to_string(formula.root, formula.ap_set);
}

}  // namespace ltlplan
