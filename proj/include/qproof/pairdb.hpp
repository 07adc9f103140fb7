#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qproof/classical.hpp"
#include "qproof/grover.hpp"
#include "qproof/proof.hpp"
#include "qproof/rng.hpp"
#include "qproof/rules.hpp"
#include "qproof/statevector.hpp"

namespace qproof {

class NotProvableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CopyConsumedError : public std::runtime_error {
 public:
  CopyConsumedError() : std::runtime_error("database copy already consumed") {}
};

// Register geometry of one database copy: two n-qubit registers, left
// positions in qubits 0..n-1, right positions in qubits n..2n-1, so the
// pair (a, b) is the basis state a * 2^n + b.
struct DbParams {
  std::size_t k = 0;  // clauses encoded (after padding, k >= 2)
  int n = 0;          // qubits per register, 2^n >= k
};

// Encodes the table into basis indices a * 2^n + b. Single-pair tables are
// padded with an identity pair so the registers are at least one qubit wide.
inline std::pair<DbParams, BasisSet> encode_pairs(const PairTable& table) {
  PairTable t = table;
  if (t.k < 1) throw std::invalid_argument("encode_pairs: empty table");
  while (t.k < 2) {
    t.entries.push_back({Atom{"Pad", 0}, t.k, t.k});
    ++t.k;
  }
  std::vector<bool> seen_a(t.k, false), seen_b(t.k, false);
  for (const auto& e : t.entries) {
    if (e.a >= t.k || e.b >= t.k || seen_a[e.a] || seen_b[e.b])
      throw std::invalid_argument("encode_pairs: table is not a bijection");
    seen_a[e.a] = seen_b[e.b] = true;
  }
  DbParams params{t.k, register_width(t.k)};
  std::vector<std::uint64_t> states;
  states.reserve(t.k);
  for (const auto& e : t.entries)
    states.push_back((std::uint64_t{e.a} << params.n) | e.b);
  return {params, make_basis_set(2 * params.n, std::move(states))};
}

// k single-use copies of the prepared pair superposition. The copies are
// identical until consumed, so one Preparation backs them all; `used` is the
// measured-copies ledger.
struct EntangledDb {
  DbParams params;
  PairTable table;  // padded
  BasisSet basis;
  Preparation prep;
  std::vector<bool> used;
};

inline EntangledDb make_database(const PairTable& table) {
  auto [params, basis] = encode_pairs(table);
  PairTable padded = table;
  while (padded.k < params.k) {
    padded.entries.push_back({Atom{"Pad", 0}, padded.k, padded.k});
    ++padded.k;
  }
  Preparation prep = prepare_basis_set(basis);
  return EntangledDb{params, std::move(padded), std::move(basis), std::move(prep),
                     std::vector<bool>(params.k, false)};
}

struct QueryResult {
  std::size_t a = 0;
  int iterations = 0;
  double premeasure_target_prob = 0.0;          // P(left register == true a)
  std::map<std::string, std::uint64_t> histogram;  // left-register outcomes
};

namespace detail {

inline std::size_t true_partner(const EntangledDb& db, std::size_t b) {
  for (const auto& e : db.table.entries)
    if (e.b == b) return e.a;
  throw std::invalid_argument("query: no pair with that right position");
}

}  // namespace detail

// One Grover query against copy `copy_index`: the oracle recognizes the
// right-register pattern b, amplification runs floor(pi sqrt(k)/4) rounds,
// then the copy is measured and burned.
//
// shots == 1 collapses the left register once, the bare single-measurement
// protocol. shots > 1 stands for that many independently prepared runs the
// way the simulator experiments report them: the full register is sampled,
// outcomes whose right half does not read back b are discarded, and the
// majority left half wins. The readback filter is what keeps decoding exact
// at k = 2, where one marked state in a database of two pins the success
// probability at 1/2 forever.
inline QueryResult query_partner(EntangledDb& db, std::size_t copy_index,
                                 std::size_t b, SeededRng& rng,
                                 std::uint64_t shots = 1) {
  if (copy_index >= db.used.size())
    throw std::invalid_argument("query: copy index out of range");
  if (db.used[copy_index]) throw CopyConsumedError();
  db.used[copy_index] = true;

  const int n = db.params.n;
  std::vector<int> left_reg(n), right_reg(n);
  for (int q = 0; q < n; ++q) {
    left_reg[q] = q;
    right_reg[q] = n + q;
  }
  const std::string b_bits = index_to_bits(b, n);

  PatternOracle oracle{2 * n, right_reg, b_bits};
  Preparation& prep = db.prep;
  const int iters = grover_iterations(db.params.k, 1);
  StateVector state = run_grover(
      prep, [&](StateVector& s) { apply_pattern_phase(s, oracle); }, iters);

  QueryResult res;
  res.iterations = iters;
  const std::size_t a_true = detail::true_partner(db, b);
  const std::string a_bits = index_to_bits(a_true, n);
  for (const auto& [key, p] : probabilities(state, left_reg))
    if (key == a_bits) res.premeasure_target_prob = p;

  if (shots <= 1) {
    const std::string outcome = measure_collapse(state, left_reg, rng);
    res.histogram[outcome] = 1;
    res.a = bits_to_index(outcome);
    return res;
  }

  std::vector<int> all(2 * n);
  for (int q = 0; q < 2 * n; ++q) all[q] = q;
  const auto full = sample(state, all, shots, rng);
  std::map<std::string, std::uint64_t> filtered, unfiltered;
  for (const auto& [key, count] : full) {
    const std::string left = key.substr(0, n);
    unfiltered[left] += count;
    if (key.substr(n) == b_bits) filtered[left] += count;
  }
  const auto& votes = filtered.empty() ? unfiltered : filtered;
  std::string best;
  std::uint64_t best_count = 0;
  for (const auto& [key, count] : votes) {
    if (count > best_count) {  // ties resolve to the smaller bitstring
      best = key;
      best_count = count;
    }
  }
  res.histogram = unfiltered;
  res.a = bits_to_index(best);
  return res;
}

struct QueryStats {
  std::vector<int> iterations;  // per query
  std::size_t oracle_calls = 0;  // sum over the successful attempt
  std::vector<bool> success;     // per query, set once the attempt validates
  int attempts = 0;
  std::vector<double> premeasure_target_prob;
  std::vector<std::map<std::string, std::uint64_t>> histograms;
};

struct RecoveredPermutation {
  std::vector<std::size_t> perm;  // right position -> left position
  QueryStats stats;
};

// Queries b = 0..k-1 on copies 0..k-1, each on its own rng substream. A
// result set that is not a permutation means some query measured wrong; up
// to `max_attempts` fresh databases are burned before giving up.
inline RecoveredPermutation recover_permutation(const Sequent& s, SeededRng& rng,
                                                std::uint64_t shots = 1000,
                                                int max_attempts = 3) {
  const PairTable table = match_atom_pairs(s);
  const std::size_t k = table.k;

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    SeededRng attempt_rng = rng.substream(static_cast<std::uint64_t>(attempt));
    EntangledDb db = make_database(table);
    QueryStats stats;
    stats.attempts = attempt + 1;
    std::vector<std::size_t> perm;
    for (std::size_t b = 0; b < k; ++b) {
      SeededRng q_rng = attempt_rng.substream(b);
      QueryResult q = query_partner(db, b, b, q_rng, shots);
      perm.push_back(q.a);
      stats.iterations.push_back(q.iterations);
      stats.oracle_calls += static_cast<std::size_t>(q.iterations);
      stats.premeasure_target_prob.push_back(q.premeasure_target_prob);
      stats.histograms.push_back(std::move(q.histogram));
    }
    std::vector<bool> seen(k, false);
    bool ok = true;
    for (std::size_t a : perm) {
      if (a >= k || seen[a]) {
        ok = false;
        break;
      }
      seen[a] = true;
    }
    if (ok) {
      stats.success.assign(k, true);
      return {std::move(perm), std::move(stats)};
    }
  }
  throw RecoveryError("quantum recovery failed");
}

namespace detail {

// Rebuilds the *-Right cascade from the recovered pairing: at every tensor
// node of the right side, the left atoms whose partner position falls in the
// left operand's span go to premise 0. Leftmost-first on right-nested
// formulas, and the same rule handles arbitrary right trees.
inline ProofTree build_split_tree(const Sequent& cur, const FormulaPtr& rf,
                                  std::size_t lo,
                                  const std::vector<std::size_t>& pos_to_b) {
  if (rf->is_atom()) return ProofTree{cur, AxiomRule{}, {}};
  const std::size_t left_span = flatten_atoms(rf->lhs()).size();
  TensorRight r{0, {}, {}};
  r.left_to.resize(cur.left.size());
  r.right_to.assign(cur.right.size(), 0);
  for (std::size_t i = 0; i < cur.left.size(); ++i) {
    const int uid = cur.left[i]->as_atom().uid;
    const std::size_t b = pos_to_b.at(static_cast<std::size_t>(uid));
    r.left_to[i] = static_cast<std::uint8_t>(!(b >= lo && b < lo + left_span));
  }
  RuleApp rule{std::move(r)};
  std::vector<Sequent> prems = apply_rule(cur, rule);
  ProofTree t{cur, std::move(rule), {}};
  t.premises.push_back(build_split_tree(prems[0], rf->lhs(), lo, pos_to_b));
  t.premises.push_back(
      build_split_tree(prems[1], rf->rhs(), lo + left_span, pos_to_b));
  return t;
}

}  // namespace detail

struct PairDbProof {
  ProofTree tree;
  std::vector<std::size_t> permutation;
  QueryStats stats;
};

// The full pipeline: saturate *-Left, recover the pairing with one Grover
// query per clause, replay the splits, check the result.
inline PairDbProof prove_pairdb(const Sequent& s, SeededRng& rng,
                                std::uint64_t shots = 1000) {
  if (side_contains_lolli(s.left) || side_contains_lolli(s.right))
    throw std::invalid_argument("prove_pairdb: tensor-only sequents required");
  if (s.right.size() != 1)
    throw std::invalid_argument(
        "prove_pairdb: tensor-only sequents carry a single right formula");

  RecoveredPermutation rec = recover_permutation(s, rng, shots);

  // Tag left atoms with their flatten position so the recovered pairing can
  // follow them through the saturation steps.
  Sequent tagged = retag_sequent(s);
  const std::size_t k = flatten_side(tagged.left).size();
  std::vector<std::size_t> pos_to_b(k);  // left position -> partner right position
  for (std::size_t b = 0; b < k; ++b) pos_to_b[rec.perm[b]] = b;

  auto [saturated, steps] = saturate_tensor_left(tagged);
  ProofTree leaf_part =
      detail::build_split_tree(saturated, saturated.right[0], 0, pos_to_b);

  // Wrap the saturation chain around the split cascade, innermost first.
  ProofTree tree = std::move(leaf_part);
  Sequent cur = tagged;
  std::vector<std::pair<Sequent, RuleApp>> chain;
  for (const RuleApp& r : steps) {
    chain.emplace_back(cur, r);
    cur = apply_rule(cur, r)[0];
  }
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    tree = ProofTree{it->first, it->second, {std::move(tree)}};

  if (!check_proof(tree))
    throw NotProvableError("not provable: axiom check failed");
  return PairDbProof{std::move(tree), std::move(rec.perm), std::move(rec.stats)};
}

}  // namespace qproof
