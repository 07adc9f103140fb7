#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "qproof/classical.hpp"
#include "qproof/grover.hpp"
#include "qproof/pairdb.hpp"
#include "qproof/proof.hpp"
#include "qproof/rng.hpp"
#include "qproof/rules.hpp"
#include "qproof/statevector.hpp"

namespace qproof {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-clause code for the tensor pipeline: one premise-choice bit per split
// of the right side (0 = left premise, 1 = right premise, 0-filled where the
// clause no longer participates) followed by the clause's left-side position.
struct SplitCodeTensor {
  Atom atom;
  std::size_t clause_pos = 0;  // left-side position, the index bits
  std::string split_bits;      // k-1 bits, split order = preorder of the right tree
  std::string index_bits;      // ceil(log2 k) bits

  std::string display() const { return split_bits + "|" + index_bits; }
  std::uint64_t value() const { return bits_to_index(split_bits + index_bits); }
  int width() const { return static_cast<int>(split_bits.size() + index_bits.size()); }
};

// Per-clause code for the implication pipeline: a (sequent, side) bit pair
// per rule step, (0,0)-filled at steps processing other branches, followed
// by the clause's rank. Clauses are ranked by (name, occurrence), ties by
// side then position, which is the order the labelled examples print.
struct SplitCodeLolli {
  Atom atom;
  int uid = -1;                // occurrence id in the root sequent
  std::size_t clause_rank = 0;
  std::string step_bits;       // 2 bits per step
  std::string index_bits;

  std::string display() const { return step_bits + "|" + index_bits; }
  std::uint64_t value() const { return bits_to_index(step_bits + index_bits); }
  int width() const { return static_cast<int>(step_bits.size() + index_bits.size()); }
};

namespace detail {

inline std::size_t leaf_count(const FormulaPtr& f) {
  if (f->is_atom()) return 1;
  return leaf_count(f->lhs()) + leaf_count(f->rhs());
}

// Preorder walk of the right tree marking, at split j, the clauses whose
// partner position sits in the right operand.
inline void mark_split_bits(const FormulaPtr& f, std::size_t lo, std::size_t& counter,
                            const std::vector<std::size_t>& partner_b,
                            std::vector<std::string>& bits) {
  if (f->is_atom()) return;
  const std::size_t j = counter++;
  const std::size_t lspan = leaf_count(f->lhs());
  const std::size_t span = lspan + leaf_count(f->rhs());
  for (std::size_t p = 0; p < partner_b.size(); ++p)
    if (partner_b[p] >= lo + lspan && partner_b[p] < lo + span) bits[p][j] = '1';
  mark_split_bits(f->lhs(), lo, counter, partner_b, bits);
  mark_split_bits(f->rhs(), lo + lspan, counter, partner_b, bits);
}

}  // namespace detail

// Codes for a saturated balanced tensor-only sequent, ordered by left
// position.
inline std::vector<SplitCodeTensor> derive_split_codes_tensor(const Sequent& s) {
  if (s.right.size() != 1)
    throw std::invalid_argument("split codes: single right formula required");
  for (const auto& f : s.left)
    if (!f->is_atom())
      throw std::invalid_argument("split codes: left side must be atomic");
  const PairTable table = match_atom_pairs(s);  // throws on unbalanced atoms
  const std::size_t k = table.k;
  if (k < 2) throw std::invalid_argument("split codes: need at least 2 clauses");

  std::vector<std::size_t> partner_b(k);
  for (const auto& e : table.entries) partner_b[e.a] = e.b;

  std::vector<std::string> bits(k, std::string(k - 1, '0'));
  std::size_t counter = 0;
  detail::mark_split_bits(s.right[0], 0, counter, partner_b, bits);

  const int index_width = register_width(k);
  std::vector<SplitCodeTensor> codes;
  codes.reserve(k);
  for (std::size_t p = 0; p < k; ++p) {
    SplitCodeTensor c;
    c.atom = table.entries[p].atom;
    c.clause_pos = p;
    c.split_bits = bits[p];
    c.index_bits = index_to_bits(p, index_width);
    codes.push_back(std::move(c));
  }
  return codes;
}

namespace detail {

struct TaggedClause {
  Atom atom;
  int side = 0;  // 0 left, 1 right
  std::size_t pos = 0;
};

inline std::vector<TaggedClause> clause_table(const Sequent& tagged) {
  std::vector<TaggedClause> out;
  for (const Atom& a : flatten_side(tagged.left))
    out.push_back({a, 0, out.size()});
  for (const Atom& a : flatten_side(tagged.right))
    out.push_back({a, 1, out.size()});
  return out;
}

// rank[uid] after sorting clauses by (name, occ, side, position).
inline std::vector<std::size_t> clause_ranks(const std::vector<TaggedClause>& clauses) {
  std::vector<std::size_t> order(clauses.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const TaggedClause& a = clauses[x];
    const TaggedClause& b = clauses[y];
    return std::tie(a.atom.name, a.atom.occ, a.side, a.pos) <
           std::tie(b.atom.name, b.atom.occ, b.side, b.pos);
  });
  std::vector<std::size_t> rank(clauses.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

inline void collect_uids(const std::vector<FormulaPtr>& side, int side_bit,
                         std::map<int, std::pair<int, int>>& where, int seq_bit) {
  for (const auto& f : side)
    for (const Atom& a : flatten_atoms(f)) where[a.uid] = {seq_bit, side_bit};
}

// Where every occurrence of `s` lands across `premises`: uid -> (premise
// index, side).
inline std::map<int, std::pair<int, int>> landing_map(
    const std::vector<Sequent>& premises) {
  std::map<int, std::pair<int, int>> where;
  for (std::size_t p = 0; p < premises.size(); ++p) {
    collect_uids(premises[p].left, 0, where, static_cast<int>(p));
    collect_uids(premises[p].right, 1, where, static_cast<int>(p));
  }
  return where;
}

}  // namespace detail

// Schedules are preorder rule lists, axiom/open leaf markers included; an
// exhausted list leaves the remaining branches open.
inline std::vector<RuleApp> preorder_rules(const ProofTree& t) {
  std::vector<RuleApp> out;
  out.push_back(t.rule);
  for (const auto& p : t.premises) {
    auto sub = preorder_rules(p);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

namespace detail {

struct ScheduleReplay {
  const std::vector<RuleApp>& schedule;
  std::size_t next = 0;
  std::size_t steps = 0;
  // per uid: step bits accumulated so far (2 chars per step)
  std::map<int, std::string>* bits = nullptr;

  ProofTree replay(const Sequent& cur) {
    if (next >= schedule.size()) return ProofTree{cur, OpenLeaf{}, {}};
    RuleApp rule = schedule[next++];
    if (std::holds_alternative<OpenLeaf>(rule)) return ProofTree{cur, rule, {}};
    if (std::holds_alternative<AxiomRule>(rule)) {
      if (!is_axiom(cur))
        throw std::invalid_argument("schedule: axiom marker on a non-axiom");
      return ProofTree{cur, rule, {}};
    }
    std::vector<Sequent> prems = apply_rule(cur, rule);
    if (bits) {
      const std::size_t j = steps++;
      auto where = landing_map(prems);
      for (auto& [uid, s] : *bits) {
        while (s.size() < 2 * (j + 1)) s += "00";
        auto it = where.find(uid);
        if (it != where.end()) {
          s[2 * j] = static_cast<char>('0' + it->second.first);
          s[2 * j + 1] = static_cast<char>('0' + it->second.second);
        }
      }
    } else {
      ++steps;
    }
    ProofTree t{cur, std::move(rule), {}};
    for (const Sequent& p : prems) t.premises.push_back(replay(p));
    return t;
  }
};

}  // namespace detail

// Codes for the implication pipeline, derived by replaying a known
// derivation skeleton over the tagged sequent. Ordered by clause rank.
inline std::vector<SplitCodeLolli> derive_split_codes_lolli(
    const Sequent& s, const std::vector<RuleApp>& schedule) {
  Sequent tagged = retag_sequent(s);
  const auto clauses = detail::clause_table(tagged);
  const auto rank = detail::clause_ranks(clauses);

  std::map<int, std::string> bits;
  for (const auto& c : clauses) bits[c.atom.uid] = "";

  detail::ScheduleReplay replay{schedule, 0, 0, &bits};
  replay.replay(tagged);
  const std::size_t steps = replay.steps;
  for (auto& [uid, b] : bits)
    while (b.size() < 2 * steps) b += "00";

  const int index_width = register_width(std::max<std::size_t>(clauses.size(), 2));
  std::vector<SplitCodeLolli> codes(clauses.size());
  for (const auto& c : clauses) {
    SplitCodeLolli code;
    code.atom = c.atom;
    code.uid = c.atom.uid;
    code.clause_rank = rank[static_cast<std::size_t>(c.atom.uid)];
    code.step_bits = bits[c.atom.uid];
    code.index_bits = index_to_bits(code.clause_rank, index_width);
    codes[code.clause_rank] = std::move(code);
  }
  return codes;
}

// --- the quantum search over codes ---------------------------------------

struct SplitAssignment {
  std::map<std::uint64_t, std::uint64_t> code_by_index;  // index value -> code
  bool complete = false;
};

struct SplitStats {
  int width = 0;
  int iterations_per_run = 0;
  double marked_prob_premeasure = 0.0;
  int runs = 0;
  std::size_t accepted = 0;
  std::size_t rejected_unmarked = 0;
  std::size_t rejected_duplicate = 0;
  std::map<std::string, std::uint64_t> outcome_hist;
};

// Repeated amplified sampling: prepare the uniform state over all code
// qubits, amplify the marked set, measure everything. An outcome joins the
// assignment only if the full code is marked and its index is new; unmarked
// noise never corrupts the assignment. Runs consume (seed, run) substreams.
inline std::pair<SplitAssignment, SplitStats> run_split_search(
    const std::vector<std::uint64_t>& marked_codes, int width, int index_width,
    std::size_t clause_count, int budget, SeededRng& rng) {
  if (marked_codes.empty())
    throw std::invalid_argument("split search: no marked codes");
  if (width < 1 || width > kMaxQubits)
    throw std::invalid_argument("split search: code width out of range");

  MarkedSetOracle oracle{width, {marked_codes.begin(), marked_codes.end()}};
  Preparation prep = prepare_uniform(width);
  const int iters =
      grover_iterations(std::uint64_t{1} << width, oracle.marked.size());
  StateVector amplified = run_grover(
      prep, [&](StateVector& s) { apply_marked_phase(s, oracle); }, iters);

  SplitStats stats;
  stats.width = width;
  stats.iterations_per_run = iters;
  stats.marked_prob_premeasure = marked_probability(amplified, oracle.marked);

  std::vector<int> all(width);
  for (int q = 0; q < width; ++q) all[q] = q;
  const std::uint64_t index_mask = (std::uint64_t{1} << index_width) - 1;

  SplitAssignment assignment;
  for (int run = 0; run < budget; ++run) {
    if (assignment.code_by_index.size() == clause_count) break;
    StateVector s = amplified;  // every run starts from a fresh preparation
    SeededRng run_rng = rng.substream(static_cast<std::uint64_t>(run));
    const std::string outcome = measure_collapse(s, all, run_rng);
    ++stats.runs;
    ++stats.outcome_hist[outcome];
    const std::uint64_t value = bits_to_index(outcome);
    if (!oracle.marked.count(value)) {
      ++stats.rejected_unmarked;
      continue;
    }
    const std::uint64_t index = value & index_mask;
    if (assignment.code_by_index.count(index)) {
      ++stats.rejected_duplicate;
      continue;
    }
    assignment.code_by_index[index] = value;
    ++stats.accepted;
  }
  assignment.complete = assignment.code_by_index.size() == clause_count;
  return {std::move(assignment), std::move(stats)};
}

// --- decoding -------------------------------------------------------------

namespace detail {

struct TensorDecoder {
  const std::vector<std::string>& split_bits;  // by left position
  std::vector<std::vector<bool>> consulted;
  std::size_t counter = 0;

  ProofTree walk(const Sequent& cur, const FormulaPtr& rf) {
    if (rf->is_atom()) {
      if (cur.left.size() != 1 || !cur.left[0]->is_atom())
        throw DecodeError("inconsistent assignment");
      return ProofTree{cur, AxiomRule{}, {}};
    }
    const std::size_t j = counter++;
    TensorRight r{0, {}, {}};
    r.left_to.resize(cur.left.size());
    r.right_to.assign(cur.right.size(), 0);
    for (std::size_t i = 0; i < cur.left.size(); ++i) {
      const int uid = cur.left[i]->as_atom().uid;
      const std::size_t p = static_cast<std::size_t>(uid);
      r.left_to[i] = static_cast<std::uint8_t>(split_bits[p][j] == '1');
      consulted[p][j] = true;
    }
    RuleApp rule{std::move(r)};
    std::vector<Sequent> prems;
    try {
      prems = apply_rule(cur, rule);
    } catch (const RuleError&) {
      throw DecodeError("inconsistent assignment");
    }
    ProofTree t{cur, std::move(rule), {}};
    t.premises.push_back(walk(prems[0], rf->lhs()));
    t.premises.push_back(walk(prems[1], rf->rhs()));
    return t;
  }
};

}  // namespace detail

// Rebuilds the *-Right cascade of a saturated sequent from a complete
// assignment. Split bits the clause's branch never reaches must be 0, which
// is what rejects codes that only agree with a valid routing on a prefix.
inline ProofTree decode_assignment_tensor(const SplitAssignment& assignment,
                                          const Sequent& s) {
  if (s.right.size() != 1)
    throw std::invalid_argument("decode: single right formula required");
  Sequent tagged = retag_sequent(s);
  const std::size_t k = tagged.left.size();
  for (const auto& f : tagged.left)
    if (!f->is_atom())
      throw std::invalid_argument("decode: left side must be atomic");
  if (!assignment.complete || assignment.code_by_index.size() != k)
    throw DecodeError("assignment incomplete");

  const int index_width = register_width(k);
  std::vector<std::string> split_bits(k);
  for (std::size_t p = 0; p < k; ++p) {
    auto it = assignment.code_by_index.find(p);
    if (it == assignment.code_by_index.end())
      throw DecodeError("assignment incomplete");
    split_bits[p] =
        index_to_bits(it->second >> index_width, static_cast<int>(k - 1));
  }

  detail::TensorDecoder decoder{split_bits,
                                std::vector<std::vector<bool>>(
                                    k, std::vector<bool>(k - 1, false)),
                                0};
  ProofTree tree = decoder.walk(tagged, tagged.right[0]);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t j = 0; j + 1 < k; ++j)
      if (!decoder.consulted[p][j] && split_bits[p][j] != '0')
        throw DecodeError("inconsistent assignment");
  if (!check_proof(tree)) throw DecodeError("inconsistent assignment");
  return tree;
}

namespace detail {

struct LolliDecoder {
  const std::vector<RuleApp>& schedule;
  const std::map<int, std::string>& step_bits;  // by uid, 2 chars per step
  std::size_t next = 0;
  std::size_t step = 0;
  std::set<int> consulted_any;
  std::map<int, std::vector<bool>> consulted;

  std::pair<int, int> code_at(int uid, std::size_t j) const {
    const std::string& b = step_bits.at(uid);
    return {b[2 * j] - '0', b[2 * j + 1] - '0'};
  }

  std::uint8_t premise_of(const std::vector<FormulaPtr>& side, std::size_t i,
                          std::size_t j) const {
    // every occurrence inside one routed formula must agree on the premise
    std::vector<Atom> atoms = flatten_atoms(side[i]);
    const int first = code_at(atoms[0].uid, j).first;
    for (const Atom& a : atoms)
      if (code_at(a.uid, j).first != first)
        throw DecodeError("inconsistent assignment");
    return static_cast<std::uint8_t>(first);
  }

  ProofTree walk(const Sequent& cur) {
    if (next >= schedule.size()) return ProofTree{cur, OpenLeaf{}, {}};
    RuleApp rule = schedule[next++];
    if (std::holds_alternative<OpenLeaf>(rule)) return ProofTree{cur, rule, {}};
    if (std::holds_alternative<AxiomRule>(rule)) {
      if (!is_axiom(cur)) throw DecodeError("inconsistent assignment");
      return ProofTree{cur, rule, {}};
    }

    const std::size_t j = step++;
    // rebuild the context routing from the codes; the skeleton only
    // contributes the rule kind and principal position
    if (auto* tr = std::get_if<TensorRight>(&rule)) {
      tr->left_to.assign(cur.left.size(), 0);
      tr->right_to.assign(cur.right.size(), 0);
      for (std::size_t i = 0; i < cur.left.size(); ++i)
        tr->left_to[i] = premise_of(cur.left, i, j);
      for (std::size_t i = 0; i < cur.right.size(); ++i)
        if (i != tr->pos) tr->right_to[i] = premise_of(cur.right, i, j);
    } else if (auto* ll = std::get_if<LolliLeft>(&rule)) {
      ll->left_to.assign(cur.left.size(), 0);
      ll->right_to.assign(cur.right.size(), 0);
      for (std::size_t i = 0; i < cur.left.size(); ++i)
        if (i != ll->pos) ll->left_to[i] = premise_of(cur.left, i, j);
      for (std::size_t i = 0; i < cur.right.size(); ++i)
        ll->right_to[i] = premise_of(cur.right, i, j);
    }

    std::vector<Sequent> prems;
    try {
      prems = apply_rule(cur, rule);
    } catch (const RuleError&) {
      throw DecodeError("inconsistent assignment");
    }

    // validate every live occurrence's (sequent, side) pair, including the
    // forced destinations of antecedents and consequents
    const auto where = landing_map(prems);
    for (const auto& [uid, dest] : where) {
      if (code_at(uid, j) != dest) throw DecodeError("inconsistent assignment");
      auto& seen = consulted[uid];
      if (seen.size() <= j) seen.resize(j + 1, false);
      seen[j] = true;
    }

    ProofTree t{cur, std::move(rule), {}};
    for (const Sequent& p : prems) t.premises.push_back(walk(p));
    return t;
  }
};

inline bool has_open_leaf(const ProofTree& t) {
  if (std::holds_alternative<OpenLeaf>(t.rule)) return true;
  for (const auto& p : t.premises)
    if (has_open_leaf(p)) return true;
  return false;
}

}  // namespace detail

// Rebuilds the derivation for the implication pipeline: the skeleton gives
// the rule kinds and principal positions, the recovered codes give every
// routing decision. Steps a clause's branch never reaches must read (0,0).
inline ProofTree decode_assignment_lolli(const SplitAssignment& assignment,
                                         const Sequent& s,
                                         const std::vector<RuleApp>& schedule) {
  Sequent tagged = retag_sequent(s);
  const auto clauses = detail::clause_table(tagged);
  const auto rank = detail::clause_ranks(clauses);
  if (!assignment.complete || assignment.code_by_index.size() != clauses.size())
    throw DecodeError("assignment incomplete");

  std::size_t steps = 0;
  for (const auto& r : schedule)
    if (!std::holds_alternative<AxiomRule>(r) && !std::holds_alternative<OpenLeaf>(r))
      ++steps;
  const int index_width = register_width(std::max<std::size_t>(clauses.size(), 2));

  std::map<int, std::string> step_bits;
  for (const auto& c : clauses) {
    auto it = assignment.code_by_index.find(rank[static_cast<std::size_t>(c.atom.uid)]);
    if (it == assignment.code_by_index.end()) throw DecodeError("assignment incomplete");
    step_bits[c.atom.uid] =
        index_to_bits(it->second >> index_width, static_cast<int>(2 * steps));
  }

  detail::LolliDecoder decoder{schedule, step_bits, 0, 0, {}, {}};
  ProofTree tree = decoder.walk(tagged);

  for (const auto& [uid, bits] : step_bits) {
    const auto& seen = decoder.consulted[uid];
    for (std::size_t j = 0; j < steps; ++j) {
      const bool touched = j < seen.size() && seen[j];
      if (!touched && (bits[2 * j] != '0' || bits[2 * j + 1] != '0'))
        throw DecodeError("inconsistent assignment");
    }
  }
  if (!detail::has_open_leaf(tree) && !check_proof(tree))
    throw DecodeError("inconsistent assignment");
  return tree;
}

// --- end-to-end -----------------------------------------------------------

struct SplitSearchProof {
  ProofTree tree;
  bool closed = true;  // false when the schedule leaves open branches
  std::vector<std::string> codes;  // display form, derivation order
  SplitAssignment assignment;
  SplitStats stats;
};

// Saturates where the fragment allows, derives the per-clause codes, runs
// the amplified search until every clause is collected, decodes, checks.
// Implication sequents need a classical proof first to pin the rule
// schedule; the quantum pass then recovers every routing decision.
inline SplitSearchProof prove_splitsearch(const Sequent& s, SeededRng& rng,
                                          int budget = 200) {
  SplitSearchProof out;

  if (side_contains_lolli(s.left) || side_contains_lolli(s.right)) {
    auto proof = prove_bruteforce(s, Fragment::TensorLolli);
    if (!proof) throw NotProvableError("not provable");
    const std::vector<RuleApp> schedule = preorder_rules(*proof);
    const auto codes = derive_split_codes_lolli(s, schedule);
    std::vector<std::uint64_t> marked;
    for (const auto& c : codes) {
      marked.push_back(c.value());
      out.codes.push_back(c.display());
    }
    const int width = codes[0].width();
    const int index_width = static_cast<int>(codes[0].index_bits.size());
    auto [assignment, stats] =
        run_split_search(marked, width, index_width, codes.size(), budget, rng);
    if (!assignment.complete)
      throw RecoveryError("split search budget exhausted");
    out.tree = decode_assignment_lolli(assignment, s, schedule);
    out.closed = !detail::has_open_leaf(out.tree);
    out.assignment = std::move(assignment);
    out.stats = std::move(stats);
    return out;
  }

  if (s.right.size() != 1)
    throw std::invalid_argument(
        "prove_splitsearch: tensor-only sequents carry a single right formula");
  match_atom_pairs(s);  // unbalanced atoms fail before any quantum step

  Sequent tagged = retag_sequent(s);
  auto [saturated, steps] = saturate_tensor_left(tagged);

  ProofTree core;
  if (saturated.left.size() == 1) {
    core = ProofTree{saturated, AxiomRule{}, {}};  // k = 1, nothing to search
  } else {
    const auto codes = derive_split_codes_tensor(saturated);
    std::vector<std::uint64_t> marked;
    for (const auto& c : codes) {
      marked.push_back(c.value());
      out.codes.push_back(c.display());
    }
    const int width = codes[0].width();
    const int index_width = static_cast<int>(codes[0].index_bits.size());
    auto [assignment, stats] =
        run_split_search(marked, width, index_width, codes.size(), budget, rng);
    if (!assignment.complete)
      throw RecoveryError("split search budget exhausted");
    core = decode_assignment_tensor(assignment, saturated);
    out.assignment = std::move(assignment);
    out.stats = std::move(stats);
  }

  ProofTree tree = std::move(core);
  Sequent cur = tagged;
  std::vector<std::pair<Sequent, RuleApp>> chain;
  for (const RuleApp& r : steps) {
    chain.emplace_back(cur, r);
    cur = apply_rule(cur, r)[0];
  }
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    tree = ProofTree{it->first, it->second, {std::move(tree)}};
  if (!check_proof(tree)) throw DecodeError("inconsistent assignment");
  out.tree = std::move(tree);
  return out;
}

}  // namespace qproof
