#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qproof/formula.hpp"
#include "qproof/rules.hpp"

namespace qproof {

// A derivation tree. A *proof* is a derivation whose every leaf is a valid
// axiom; trees with OpenLeaf nodes are unfinished derivations and are
// representable (some split-code schedules stop before closing every branch)
// but never check as proofs.
struct ProofTree {
  Sequent conclusion;
  RuleApp rule;
  std::vector<ProofTree> premises;
};

inline std::size_t node_count(const ProofTree& t) {
  std::size_t n = 1;
  for (const auto& p : t.premises) n += node_count(p);
  return n;
}

inline bool tree_equal(const ProofTree& a, const ProofTree& b) {
  if (!(a.conclusion == b.conclusion)) return false;
  if (a.rule.index() != b.rule.index()) return false;
  if (a.premises.size() != b.premises.size()) return false;
  for (std::size_t i = 0; i < a.premises.size(); ++i)
    if (!tree_equal(a.premises[i], b.premises[i])) return false;
  return true;
}

// True iff every node's premises are exactly what apply_rule produces from
// its conclusion and every leaf is a valid axiom.
inline bool check_proof(const ProofTree& t) {
  if (std::holds_alternative<OpenLeaf>(t.rule)) return false;
  if (std::holds_alternative<AxiomRule>(t.rule))
    return t.premises.empty() && is_axiom(t.conclusion);
  std::vector<Sequent> want;
  try {
    want = apply_rule(t.conclusion, t.rule);
  } catch (const RuleError&) {
    return false;
  }
  if (want.size() != t.premises.size()) return false;
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (t.premises[i].conclusion != want[i]) return false;
    if (!check_proof(t.premises[i])) return false;
  }
  return true;
}

namespace detail {

inline void render_tree_text(const ProofTree& t, std::size_t depth,
                             std::string& out) {
  out.append(depth * 2, ' ');
  out += render_sequent(t.conclusion);
  out += "   [";
  out += rule_name(t.rule);
  out += "]\n";
  for (const auto& p : t.premises) render_tree_text(p, depth + 1, out);
}

inline const char* latex_label(const RuleApp& r) {
  struct V {
    const char* operator()(const AxiomRule&) const { return nullptr; }
    const char* operator()(const TensorLeft&) const { return "$\\otimes$-Left"; }
    const char* operator()(const TensorRight&) const { return "$\\otimes$-Right"; }
    const char* operator()(const LolliRight&) const { return "$\\multimap$-Right"; }
    const char* operator()(const LolliLeft&) const { return "$\\multimap$-Left"; }
    const char* operator()(const OpenLeaf&) const { return nullptr; }
  };
  return std::visit(V{}, r);
}

// bussproofs emission: premises first, then the inference line.
inline void render_tree_latex(const ProofTree& t, std::string& out) {
  const std::string seq = "{$" + latex_sequent(t.conclusion) + "$}";
  if (std::holds_alternative<AxiomRule>(t.rule)) {
    out += "\\AxiomC{}\n\\UnaryInfC" + seq + "\n";
    return;
  }
  if (std::holds_alternative<OpenLeaf>(t.rule)) {
    out += "\\AxiomC" + seq + "\n";
    return;
  }
  for (const auto& p : t.premises) render_tree_latex(p, out);
  out += "\\RightLabel{";
  out += latex_label(t.rule);
  out += "}\n";
  out += (t.premises.size() == 2 ? "\\BinaryInfC" : "\\UnaryInfC") + seq + "\n";
}

}  // namespace detail

// Rendering of possibly-open derivations; no validity requirement.
inline std::string render_derivation_text(const ProofTree& t) {
  std::string out;
  detail::render_tree_text(t, 0, out);
  return out;
}

inline std::string render_derivation_latex(const ProofTree& t) {
  std::string out = "\\begin{prooftree}\n";
  detail::render_tree_latex(t, out);
  out += "\\end{prooftree}\n";
  return out;
}

enum class ProofFormat { Text, Latex };

// Deterministic proof printer; rejects anything that is not a checked proof.
inline std::string render_proof(const ProofTree& t, ProofFormat fmt) {
  if (!check_proof(t))
    throw std::invalid_argument("render_proof: tree is not a valid proof");
  return fmt == ProofFormat::Text ? render_derivation_text(t)
                                  : render_derivation_latex(t);
}

}  // namespace qproof
