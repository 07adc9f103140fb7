#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qproof/formula.hpp"
#include "qproof/proof.hpp"
#include "qproof/rules.hpp"

namespace qproof {

// Raised when the two sides do not carry the same atom multiset; such a
// sequent has no linear proof.
class AtomMismatchError : public std::runtime_error {
 public:
  AtomMismatchError() : std::runtime_error("not provable: atom mismatch") {}
};

// Atom positions: entry (atom, a, b) pairs the a-th atom of the flattened
// left side with the b-th atom of the flattened right side. For a balanced
// tensor-only sequent both coordinate sets are permutations of 0..k-1.
struct PairTable {
  struct Entry {
    Atom atom;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Entry> entries;  // ordered by left position a
  std::size_t k = 0;
};

// Matches left to right occurrences by name, first fit in flatten order.
inline PairTable match_atom_pairs(const Sequent& s) {
  if (side_contains_lolli(s.left) || side_contains_lolli(s.right))
    throw RuleError("match_atom_pairs: tensor-only sequents required");
  std::vector<Atom> lhs = flatten_side(s.left);
  std::vector<Atom> rhs = flatten_side(s.right);
  if (lhs.size() != rhs.size()) throw AtomMismatchError();
  PairTable t;
  t.k = lhs.size();
  std::vector<bool> taken(rhs.size(), false);
  for (std::size_t a = 0; a < lhs.size(); ++a) {
    std::size_t b = rhs.size();
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      if (!taken[j] && rhs[j].name == lhs[a].name) {
        b = j;
        break;
      }
    }
    if (b == rhs.size()) throw AtomMismatchError();
    taken[b] = true;
    t.entries.push_back({lhs[a], a, b});
  }
  return t;
}

enum class Fragment { TensorOnly, TensorLolli };

struct SearchStats {
  std::size_t nodes_visited = 0;
  std::size_t partitions_tried = 0;      // across all binary-rule nodes
  std::size_t max_partitions_per_node = 0;
};

namespace detail {

// Exhaustive backtracking search. Rules are tried in a fixed order (axiom,
// *-left at the lowest position, -o-right, *-right, -o-left) and context
// partitions are enumerated as binary counters over the list positions, so
// the first proof found is the same on every run.
class BruteForce {
 public:
  BruteForce(Fragment fragment, SearchStats* stats)
      : fragment_(fragment), stats_(stats) {}

  std::optional<ProofTree> prove(const Sequent& s) {
    if (stats_) ++stats_->nodes_visited;

    if (is_axiom(s)) return ProofTree{s, AxiomRule{}, {}};

    // Linearity: without contraction or weakening a tensor-only sequent
    // needs the same number of atoms on both sides, so skip subtrees that
    // cannot close. Name-blind, and implications move atoms across sides,
    // so the check is restricted to lolli-free sequents.
    if (!side_contains_lolli(s.left) && !side_contains_lolli(s.right) &&
        flatten_side(s.left).size() != flatten_side(s.right).size())
      return std::nullopt;

    for (std::size_t i = 0; i < s.left.size(); ++i) {
      if (s.left[i]->is_tensor()) {
        if (auto t = try_unary(s, RuleApp{TensorLeft{i}})) return t;
      }
    }
    if (fragment_ == Fragment::TensorLolli) {
      for (std::size_t i = 0; i < s.right.size(); ++i) {
        if (s.right[i]->is_lolli()) {
          if (auto t = try_unary(s, RuleApp{LolliRight{i}})) return t;
        }
      }
    }
    for (std::size_t i = 0; i < s.right.size(); ++i) {
      if (s.right[i]->is_tensor()) {
        if (auto t = try_tensor_right(s, i)) return t;
      }
    }
    if (fragment_ == Fragment::TensorLolli) {
      for (std::size_t i = 0; i < s.left.size(); ++i) {
        if (s.left[i]->is_lolli()) {
          if (auto t = try_lolli_left(s, i)) return t;
        }
      }
    }
    return std::nullopt;
  }

 private:
  Fragment fragment_;
  SearchStats* stats_;

  std::optional<ProofTree> try_unary(const Sequent& s, const RuleApp& r) {
    Sequent prem = apply_rule(s, r)[0];
    if (auto sub = prove(prem))
      return ProofTree{s, r, {std::move(*sub)}};
    return std::nullopt;
  }

  std::optional<ProofTree> try_binary(const Sequent& s, const RuleApp& r) {
    std::vector<Sequent> prems;
    try {
      prems = apply_rule(s, r);
    } catch (const RuleError&) {
      return std::nullopt;  // partition leaves an empty premise side
    }
    auto p0 = prove(prems[0]);
    if (!p0) return std::nullopt;
    auto p1 = prove(prems[1]);
    if (!p1) return std::nullopt;
    return ProofTree{s, r, {std::move(*p0), std::move(*p1)}};
  }

  // Counter bit i routes the i-th context position (left list first, then
  // the right list with the principal skipped); 0 sends it to premise 0.
  std::optional<ProofTree> try_tensor_right(const Sequent& s, std::size_t pos) {
    const std::size_t nl = s.left.size();
    const std::size_t nr = s.right.size() - 1;
    const std::uint64_t total = std::uint64_t{1} << (nl + nr);
    std::size_t tried = 0;
    for (std::uint64_t c = 0; c < total; ++c) {
      ++tried;
      TensorRight r{pos, {}, {}};
      r.left_to.resize(s.left.size());
      r.right_to.resize(s.right.size());
      std::size_t bit = 0;
      for (std::size_t i = 0; i < s.left.size(); ++i)
        r.left_to[i] = static_cast<std::uint8_t>((c >> bit++) & 1);
      for (std::size_t i = 0; i < s.right.size(); ++i)
        if (i != pos) r.right_to[i] = static_cast<std::uint8_t>((c >> bit++) & 1);
      if (auto t = try_binary(s, RuleApp{std::move(r)})) {
        note_partitions(tried);
        return t;
      }
    }
    note_partitions(tried);
    return std::nullopt;
  }

  std::optional<ProofTree> try_lolli_left(const Sequent& s, std::size_t pos) {
    const std::size_t nl = s.left.size() - 1;
    const std::size_t nr = s.right.size();
    const std::uint64_t total = std::uint64_t{1} << (nl + nr);
    std::size_t tried = 0;
    for (std::uint64_t c = 0; c < total; ++c) {
      ++tried;
      LolliLeft r{pos, {}, {}};
      r.left_to.resize(s.left.size());
      r.right_to.resize(s.right.size());
      std::size_t bit = 0;
      for (std::size_t i = 0; i < s.left.size(); ++i)
        if (i != pos) r.left_to[i] = static_cast<std::uint8_t>((c >> bit++) & 1);
      for (std::size_t i = 0; i < s.right.size(); ++i)
        r.right_to[i] = static_cast<std::uint8_t>((c >> bit++) & 1);
      if (auto t = try_binary(s, RuleApp{std::move(r)})) {
        note_partitions(tried);
        return t;
      }
    }
    note_partitions(tried);
    return std::nullopt;
  }

  void note_partitions(std::size_t tried) {
    if (!stats_) return;
    stats_->partitions_tried += tried;
    stats_->max_partitions_per_node = std::max(stats_->max_partitions_per_node, tried);
  }
};

}  // namespace detail

// Naive exhaustive proof search; deterministic first proof or nothing.
inline std::optional<ProofTree> prove_bruteforce(const Sequent& s,
                                                 Fragment fragment,
                                                 SearchStats* stats = nullptr) {
  if (fragment == Fragment::TensorOnly &&
      (side_contains_lolli(s.left) || side_contains_lolli(s.right)))
    throw std::invalid_argument(
        "prove_bruteforce: sequent uses -o outside the tensor-only fragment");
  return detail::BruteForce(fragment, stats).prove(s);
}

}  // namespace qproof
