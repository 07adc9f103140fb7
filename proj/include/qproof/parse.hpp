#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qproof/formula.hpp"

namespace qproof {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

// Grammar:
//   sequent  := formulas "|-" formulas
//   formulas := formula ("," formula)*
//   formula  := lolli
//   lolli    := tensor ("-o" lolli)?
//   tensor   := primary ("*" tensor)?
//   primary  := ATOM | "(" formula ")"
//   ATOM     := [A-Z][A-Za-z0-9]*
//
// A trailing run of digits in an ATOM token is an explicit occurrence label:
// "A2" is the atom A, occurrence 2. "A1 |- A2" therefore closes as an axiom,
// which is what the labelled-clause examples require. Unlabelled repeats get
// the smallest free occurrence per side, left to right.
class SequentParser {
 public:
  explicit SequentParser(const std::string& text) : text_(text) {}

  Sequent parse() {
    Sequent s;
    s.left = parse_formulas("left");
    expect_turnstile();
    side_start_.push_back(raw_atoms_.size());
    s.right = parse_formulas("right");
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    resolve_occurrences(s.left, 0, "left");
    resolve_occurrences(s.right, 1, "right");
    return s;
  }

 private:
  struct RawAtom {
    std::string name;
    int explicit_occ;  // -1 when the token carried no digit suffix
    std::size_t offset;
  };

  // recursion guard: parse, printing and rule application all walk the tree
  // recursively, so formula depth is capped rather than left to the stack
  static constexpr int kMaxDepth = 4000;

  const std::string& text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<RawAtom> raw_atoms_;       // in parse order
  std::vector<std::size_t> side_start_{0};

  struct DepthGuard {
    SequentParser& p;
    explicit DepthGuard(SequentParser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth)
        throw ParseError("formula nesting too deep", p.pos_);
    }
    ~DepthGuard() { --p.depth_; }
  };

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek(const char* tok) {
    skip_ws();
    std::size_t len = std::char_traits<char>::length(tok);
    return text_.compare(pos_, len, tok) == 0;
  }

  bool consume(const char* tok) {
    if (!peek(tok)) return false;
    pos_ += std::char_traits<char>::length(tok);
    return true;
  }

  void expect_turnstile() {
    if (!consume("|-")) throw ParseError("expected '|-'", pos_);
  }

  std::vector<FormulaPtr> parse_formulas(const char* side) {
    skip_ws();
    std::size_t at = pos_;
    if (pos_ == text_.size() || peek("|-"))
      throw ParseError(std::string("empty ") + side + " side", at);
    std::vector<FormulaPtr> out;
    out.push_back(parse_formula());
    while (consume(",")) out.push_back(parse_formula());
    return out;
  }

  FormulaPtr parse_formula() { return parse_lolli(); }

  FormulaPtr parse_lolli() {
    DepthGuard guard(*this);
    FormulaPtr lhs = parse_tensor();
    if (consume("-o")) return Formula::lolli(lhs, parse_lolli());
    return lhs;
  }

  FormulaPtr parse_tensor() {
    DepthGuard guard(*this);
    FormulaPtr lhs = parse_primary();
    if (consume("*")) return Formula::tensor(lhs, parse_tensor());
    return lhs;
  }

  FormulaPtr parse_primary() {
    skip_ws();
    if (consume("(")) {
      FormulaPtr f = parse_formula();
      if (!consume(")")) throw ParseError("expected ')'", pos_);
      return f;
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    skip_ws();
    std::size_t at = pos_;
    if (pos_ >= text_.size() || !std::isupper(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("expected atom or '('", pos_);
    std::size_t end = pos_ + 1;
    while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end])))
      ++end;
    std::string token = text_.substr(pos_, end - pos_);
    pos_ = end;

    std::size_t digits = token.size();
    while (digits > 0 && std::isdigit(static_cast<unsigned char>(token[digits - 1])))
      --digits;
    RawAtom raw;
    raw.offset = at;
    if (digits == token.size()) {
      raw.name = token;
      raw.explicit_occ = -1;
    } else {
      raw.name = token.substr(0, digits);
      try {
        raw.explicit_occ = std::stoi(token.substr(digits));
      } catch (const std::out_of_range&) {
        throw ParseError("occurrence label out of range", at);
      }
    }
    raw_atoms_.push_back(raw);
    // Placeholder occurrence; resolve_occurrences rewrites the tree.
    return Formula::atom(Atom{raw.name, raw.explicit_occ, -1});
  }

  // Second pass: explicit labels are reserved first so that "A, A0" assigns
  // the bare atom occurrence 1, then unlabelled atoms take the smallest free
  // occurrence per (side, name) in left-to-right order.
  void resolve_occurrences(std::vector<FormulaPtr>& side, std::size_t which_side,
                           const char* which) {
    std::vector<Atom> atoms = flatten_side(side);
    const std::size_t base = which_side == 0 ? 0 : side_start_[1];
    std::map<std::string, std::set<int>> used;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const Atom& a = atoms[i];
      if (a.occ >= 0) {
        if (!used[a.name].insert(a.occ).second)
          throw ParseError("duplicate atom occurrence " + a.name +
                               std::to_string(a.occ) + " on " + which + " side",
                           raw_atoms_[base + i].offset);
      }
    }
    std::map<std::string, int> cursor;
    std::vector<Atom> resolved;
    resolved.reserve(atoms.size());
    for (auto a : atoms) {
      if (a.occ < 0) {
        int c = cursor.count(a.name) ? cursor[a.name] : 0;
        while (used[a.name].count(c)) ++c;
        used[a.name].insert(c);
        cursor[a.name] = c + 1;
        a.occ = c;
      }
      resolved.push_back(a);
    }
    std::size_t next = 0;
    for (auto& f : side) f = rewrite(f, resolved, next);
  }

  static FormulaPtr rewrite(const FormulaPtr& f, const std::vector<Atom>& atoms,
                            std::size_t& next) {
    if (f->is_atom()) return Formula::atom(atoms.at(next++));
    FormulaPtr l = rewrite(f->lhs(), atoms, next);
    FormulaPtr r = rewrite(f->rhs(), atoms, next);
    return f->is_tensor() ? Formula::tensor(std::move(l), std::move(r))
                          : Formula::lolli(std::move(l), std::move(r));
  }
};

}  // namespace detail

inline Sequent parse_sequent(const std::string& text) {
  return detail::SequentParser(text).parse();
}

}  // namespace qproof
