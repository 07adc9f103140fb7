#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qproof {

// An atomic clause. `occ` distinguishes repeated uses of the same name within
// a sequent ("A1", "A2"); axiom matching ignores it, structural equality does
// not. `uid` is a transient tag used by the split-code machinery to follow an
// occurrence through a derivation; it takes no part in equality or printing.
struct Atom {
  std::string name;
  int occ = 0;
  int uid = -1;
};

inline bool operator==(const Atom& a, const Atom& b) {
  return a.name == b.name && a.occ == b.occ;
}
inline bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable formula tree over atoms, tensor `*` and linear implication `-o`.
class Formula {
 public:
  enum class Kind { Atom, Tensor, Lolli };

  static FormulaPtr atom(Atom a) {
    auto f = std::make_shared<Formula>(Private{});
    f->kind_ = Kind::Atom;
    f->atom_ = std::move(a);
    return f;
  }
  static FormulaPtr tensor(FormulaPtr lhs, FormulaPtr rhs) {
    if (!lhs || !rhs) throw std::invalid_argument("tensor: null operand");
    auto f = std::make_shared<Formula>(Private{});
    f->kind_ = Kind::Tensor;
    f->lhs_ = std::move(lhs);
    f->rhs_ = std::move(rhs);
    return f;
  }
  static FormulaPtr lolli(FormulaPtr antecedent, FormulaPtr consequent) {
    if (!antecedent || !consequent) throw std::invalid_argument("lolli: null operand");
    auto f = std::make_shared<Formula>(Private{});
    f->kind_ = Kind::Lolli;
    f->lhs_ = std::move(antecedent);
    f->rhs_ = std::move(consequent);
    return f;
  }

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_tensor() const { return kind_ == Kind::Tensor; }
  bool is_lolli() const { return kind_ == Kind::Lolli; }

  const Atom& as_atom() const {
    if (kind_ != Kind::Atom) throw std::logic_error("as_atom: not an atom");
    return atom_;
  }
  // Tensor left operand / lolli antecedent.
  const FormulaPtr& lhs() const { return lhs_; }
  // Tensor right operand / lolli consequent.
  const FormulaPtr& rhs() const { return rhs_; }

  struct Private {};
  explicit Formula(Private) {}

 private:
  Kind kind_ = Kind::Atom;
  Atom atom_;
  FormulaPtr lhs_, rhs_;
};

inline bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind() != b->kind()) return false;
  if (a->is_atom()) return a->as_atom() == b->as_atom();
  return structurally_equal(a->lhs(), b->lhs()) &&
         structurally_equal(a->rhs(), b->rhs());
}

// Two-sided sequent with ordered formula lists. Positions into the flattened
// atom sequences are what the pair database is built from, so order matters.
struct Sequent {
  std::vector<FormulaPtr> left;
  std::vector<FormulaPtr> right;
};

inline bool operator==(const Sequent& a, const Sequent& b) {
  if (a.left.size() != b.left.size() || a.right.size() != b.right.size())
    return false;
  for (std::size_t i = 0; i < a.left.size(); ++i)
    if (!structurally_equal(a.left[i], b.left[i])) return false;
  for (std::size_t i = 0; i < a.right.size(); ++i)
    if (!structurally_equal(a.right[i], b.right[i])) return false;
  return true;
}
inline bool operator!=(const Sequent& a, const Sequent& b) { return !(a == b); }

namespace detail {
inline void flatten_into(const FormulaPtr& f, std::vector<Atom>& out) {
  if (f->is_atom()) {
    out.push_back(f->as_atom());
    return;
  }
  flatten_into(f->lhs(), out);
  flatten_into(f->rhs(), out);
}
}  // namespace detail

// In-order atom sequence of one formula; 0-based positions into this
// sequence identify clauses.
inline std::vector<Atom> flatten_atoms(const FormulaPtr& f) {
  std::vector<Atom> out;
  detail::flatten_into(f, out);
  return out;
}

// In-order atoms of a whole side (formulas concatenated left to right).
inline std::vector<Atom> flatten_side(const std::vector<FormulaPtr>& side) {
  std::vector<Atom> out;
  for (const auto& f : side) detail::flatten_into(f, out);
  return out;
}

inline bool contains_lolli(const FormulaPtr& f) {
  if (f->is_atom()) return false;
  if (f->is_lolli()) return true;
  return contains_lolli(f->lhs()) || contains_lolli(f->rhs());
}

inline bool side_contains_lolli(const std::vector<FormulaPtr>& side) {
  for (const auto& f : side)
    if (contains_lolli(f)) return true;
  return false;
}

inline std::size_t tensor_node_count(const FormulaPtr& f) {
  if (f->is_atom()) return 0;
  std::size_t n = f->is_tensor() ? 1 : 0;
  return n + tensor_node_count(f->lhs()) + tensor_node_count(f->rhs());
}

// Rebuilds a formula with fresh uids handed out by `next` in in-order
// sequence. Used to tag every occurrence before replaying a derivation.
inline FormulaPtr retag_atoms(const FormulaPtr& f, int& next) {
  if (f->is_atom()) {
    Atom a = f->as_atom();
    a.uid = next++;
    return Formula::atom(std::move(a));
  }
  FormulaPtr l = retag_atoms(f->lhs(), next);
  FormulaPtr r = retag_atoms(f->rhs(), next);
  return f->is_tensor() ? Formula::tensor(std::move(l), std::move(r))
                        : Formula::lolli(std::move(l), std::move(r));
}

inline Sequent retag_sequent(const Sequent& s) {
  Sequent out;
  int next = 0;
  for (const auto& f : s.left) out.left.push_back(retag_atoms(f, next));
  for (const auto& f : s.right) out.right.push_back(retag_atoms(f, next));
  return out;
}

// --- printing ------------------------------------------------------------
//
// ASCII concrete syntax: `*` for tensor, `-o` for linear implication,
// `|-` for the turnstile. Occurrence labels print as a digit suffix and are
// omitted for occurrence 0, which the parser reassigns automatically.

inline std::string format_atom(const Atom& a) {
  if (a.occ == 0) return a.name;
  return a.name + std::to_string(a.occ);
}

namespace detail {
// precedence: lolli = 0, tensor = 1, primary = 2; both operators right
// associative, so the left operand always needs one level more.
inline void render_formula_into(const FormulaPtr& f, int min_prec,
                                std::string& out) {
  int prec = f->is_atom() ? 2 : (f->is_tensor() ? 1 : 0);
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (f->kind()) {
    case Formula::Kind::Atom:
      out += format_atom(f->as_atom());
      break;
    case Formula::Kind::Tensor:
      render_formula_into(f->lhs(), 2, out);
      out += '*';
      render_formula_into(f->rhs(), 1, out);
      break;
    case Formula::Kind::Lolli:
      render_formula_into(f->lhs(), 1, out);
      out += " -o ";
      render_formula_into(f->rhs(), 0, out);
      break;
  }
  if (parens) out += ')';
}
}  // namespace detail

inline std::string render_formula(const FormulaPtr& f) {
  std::string out;
  detail::render_formula_into(f, 0, out);
  return out;
}

inline std::string render_sequent(const Sequent& s) {
  std::string out;
  for (std::size_t i = 0; i < s.left.size(); ++i) {
    if (i) out += ", ";
    detail::render_formula_into(s.left[i], 0, out);
  }
  out += " |- ";
  for (std::size_t i = 0; i < s.right.size(); ++i) {
    if (i) out += ", ";
    detail::render_formula_into(s.right[i], 0, out);
  }
  return out;
}

// LaTeX rendering used by the proof printer.
inline std::string latex_atom(const Atom& a) {
  if (a.occ == 0) return a.name;
  return a.name + "^{" + std::to_string(a.occ) + "}";
}

namespace detail {
inline void latex_formula_into(const FormulaPtr& f, int min_prec,
                               std::string& out) {
  int prec = f->is_atom() ? 2 : (f->is_tensor() ? 1 : 0);
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (f->kind()) {
    case Formula::Kind::Atom:
      out += latex_atom(f->as_atom());
      break;
    case Formula::Kind::Tensor:
      latex_formula_into(f->lhs(), 2, out);
      out += " \\otimes ";
      latex_formula_into(f->rhs(), 1, out);
      break;
    case Formula::Kind::Lolli:
      latex_formula_into(f->lhs(), 1, out);
      out += " \\multimap ";
      latex_formula_into(f->rhs(), 0, out);
      break;
  }
  if (parens) out += ')';
}
}  // namespace detail

inline std::string latex_sequent(const Sequent& s) {
  std::string out;
  for (std::size_t i = 0; i < s.left.size(); ++i) {
    if (i) out += ", ";
    detail::latex_formula_into(s.left[i], 0, out);
  }
  out += " \\vdash ";
  for (std::size_t i = 0; i < s.right.size(); ++i) {
    if (i) out += ", ";
    detail::latex_formula_into(s.right[i], 0, out);
  }
  return out;
}

}  // namespace qproof
