#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qproof/formula.hpp"

namespace qproof {

class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rule applications. Binary rules carry the routing of the conclusion's
// context as one premise bit per list position (0 = left premise,
// 1 = right premise); the entry at the principal position is ignored.
struct AxiomRule {};
struct TensorLeft {
  std::size_t pos;  // index into the left list
};
struct TensorRight {
  std::size_t pos;  // index of the principal tensor in the right list
  std::vector<std::uint8_t> left_to;
  std::vector<std::uint8_t> right_to;
};
struct LolliRight {
  std::size_t pos;  // index into the right list
};
struct LolliLeft {
  std::size_t pos;  // index into the left list
  std::vector<std::uint8_t> left_to;
  std::vector<std::uint8_t> right_to;
};
// Leaf of an unfinished derivation. Not a rule: apply_rule rejects it and
// check_proof fails on any tree containing one.
struct OpenLeaf {};

using RuleApp =
    std::variant<AxiomRule, TensorLeft, TensorRight, LolliRight, LolliLeft, OpenLeaf>;

inline const char* rule_name(const RuleApp& r) {
  struct V {
    const char* operator()(const AxiomRule&) const { return "Axiom"; }
    const char* operator()(const TensorLeft&) const { return "*-Left"; }
    const char* operator()(const TensorRight&) const { return "*-Right"; }
    const char* operator()(const LolliRight&) const { return "-o-Right"; }
    const char* operator()(const LolliLeft&) const { return "-o-Left"; }
    const char* operator()(const OpenLeaf&) const { return "Open"; }
  };
  return std::visit(V{}, r);
}

// Axiom: a single atom on each side with the same name. Occurrence labels
// are ignored, so A1 |- A2 closes.
inline bool is_axiom(const Sequent& s) {
  return s.left.size() == 1 && s.right.size() == 1 && s.left[0]->is_atom() &&
         s.right[0]->is_atom() &&
         s.left[0]->as_atom().name == s.right[0]->as_atom().name;
}

namespace detail {

inline void check_bits(const std::vector<std::uint8_t>& bits, std::size_t want,
                       const char* what) {
  if (bits.size() != want)
    throw RuleError(std::string(what) + ": partition covers " +
                    std::to_string(bits.size()) + " formulas, expected " +
                    std::to_string(want));
  for (auto b : bits)
    if (b > 1) throw RuleError(std::string(what) + ": partition bit out of range");
}

inline void check_nonempty(const Sequent& s, const char* what) {
  if (s.left.empty() || s.right.empty())
    throw RuleError(std::string(what) + ": partition leaves an empty premise side");
}

}  // namespace detail

// Premises of applying `r` to `s`, exactly as the inference figures read
// upward. Throws RuleError when the rule does not apply.
//
//   *-Left   : unpacks left[pos] = X*Y into X, Y in place (one premise)
//   *-Right  : splits right[pos] = X*Y; context routed by the premise bits,
//              X joins premise 0's right side in place, Y premise 1's
//   -o-Right : right[pos] = X-oY; X is appended to the left side, Y replaces
//              the principal (one premise)
//   -o-Left  : left[pos] = X-oY; X becomes the head of premise 0's right
//              side, Y takes the principal's place in premise 1's left side,
//              context routed by the premise bits (sides never change)
inline std::vector<Sequent> apply_rule(const Sequent& s, const RuleApp& r) {
  struct V {
    const Sequent& s;

    std::vector<Sequent> operator()(const AxiomRule&) const {
      if (!is_axiom(s)) throw RuleError("axiom: sequent is not an axiom");
      return {};
    }

    std::vector<Sequent> operator()(const OpenLeaf&) const {
      throw RuleError("open leaf is not a rule");
    }

    std::vector<Sequent> operator()(const TensorLeft& r) const {
      if (r.pos >= s.left.size()) throw RuleError("*-left: position out of range");
      const FormulaPtr& f = s.left[r.pos];
      if (!f->is_tensor()) throw RuleError("*-left: principal is not a tensor");
      Sequent prem;
      prem.right = s.right;
      prem.left.reserve(s.left.size() + 1);
      for (std::size_t i = 0; i < s.left.size(); ++i) {
        if (i == r.pos) {
          prem.left.push_back(f->lhs());
          prem.left.push_back(f->rhs());
        } else {
          prem.left.push_back(s.left[i]);
        }
      }
      return {std::move(prem)};
    }

    std::vector<Sequent> operator()(const TensorRight& r) const {
      if (r.pos >= s.right.size()) throw RuleError("*-right: position out of range");
      const FormulaPtr& f = s.right[r.pos];
      if (!f->is_tensor()) throw RuleError("*-right: principal is not a tensor");
      detail::check_bits(r.left_to, s.left.size(), "*-right");
      detail::check_bits(r.right_to, s.right.size(), "*-right");
      Sequent p0, p1;
      for (std::size_t i = 0; i < s.left.size(); ++i)
        (r.left_to[i] ? p1 : p0).left.push_back(s.left[i]);
      for (std::size_t i = 0; i < s.right.size(); ++i) {
        if (i == r.pos) {
          p0.right.push_back(f->lhs());
          p1.right.push_back(f->rhs());
        } else {
          (r.right_to[i] ? p1 : p0).right.push_back(s.right[i]);
        }
      }
      detail::check_nonempty(p0, "*-right");
      detail::check_nonempty(p1, "*-right");
      return {std::move(p0), std::move(p1)};
    }

    std::vector<Sequent> operator()(const LolliRight& r) const {
      if (r.pos >= s.right.size()) throw RuleError("-o-right: position out of range");
      const FormulaPtr& f = s.right[r.pos];
      if (!f->is_lolli()) throw RuleError("-o-right: principal is not a lolli");
      Sequent prem;
      prem.left = s.left;
      prem.left.push_back(f->lhs());
      prem.right = s.right;
      prem.right[r.pos] = f->rhs();
      return {std::move(prem)};
    }

    std::vector<Sequent> operator()(const LolliLeft& r) const {
      if (r.pos >= s.left.size()) throw RuleError("-o-left: position out of range");
      const FormulaPtr& f = s.left[r.pos];
      if (!f->is_lolli()) throw RuleError("-o-left: principal is not a lolli");
      detail::check_bits(r.left_to, s.left.size(), "-o-left");
      detail::check_bits(r.right_to, s.right.size(), "-o-left");
      Sequent p0, p1;
      p0.right.push_back(f->lhs());
      for (std::size_t i = 0; i < s.left.size(); ++i) {
        if (i == r.pos) {
          p1.left.push_back(f->rhs());
        } else {
          (r.left_to[i] ? p1 : p0).left.push_back(s.left[i]);
        }
      }
      for (std::size_t i = 0; i < s.right.size(); ++i)
        (r.right_to[i] ? p1 : p0).right.push_back(s.right[i]);
      detail::check_nonempty(p0, "-o-left");
      detail::check_nonempty(p1, "-o-left");
      return {std::move(p0), std::move(p1)};
    }
  };
  return std::visit(V{s}, r);
}

// Applies *-Left until the left side is atomic, leftmost occurrence first so
// each top connective unpacks before anything to its right. Returns the
// saturated sequent and the replayable rule list; one step per tensor node.
inline std::pair<Sequent, std::vector<RuleApp>> saturate_tensor_left(const Sequent& s) {
  if (side_contains_lolli(s.left))
    throw RuleError("saturate: left side contains a linear implication");
  Sequent cur = s;
  std::vector<RuleApp> steps;
  for (;;) {
    std::size_t pos = cur.left.size();
    for (std::size_t i = 0; i < cur.left.size(); ++i) {
      if (cur.left[i]->is_tensor()) {
        pos = i;
        break;
      }
    }
    if (pos == cur.left.size()) break;
    TensorLeft r{pos};
    cur = apply_rule(cur, RuleApp{r})[0];
    steps.emplace_back(r);
  }
  return {std::move(cur), std::move(steps)};
}

}  // namespace qproof
