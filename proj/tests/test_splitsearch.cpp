#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qproof/parse.hpp"
#include "qproof/report.hpp"
#include "qproof/splitsearch.hpp"

using namespace qproof;

namespace {

std::vector<std::string> displays(const std::vector<SplitCodeTensor>& codes) {
  std::vector<std::string> out;
  for (const auto& c : codes) out.push_back(c.display());
  return out;
}

SplitAssignment full_assignment(const std::vector<SplitCodeTensor>& codes) {
  SplitAssignment a;
  a.complete = true;
  for (const auto& c : codes) a.code_by_index[c.clause_pos] = c.value();
  return a;
}

const std::vector<RuleApp>& labelled_example_schedule() {
  static const std::vector<RuleApp> schedule = {
      RuleApp{LolliRight{0}},
      RuleApp{LolliLeft{1, {0, 0, 1}, {1, 1}}},
      RuleApp{AxiomRule{}},
      RuleApp{OpenLeaf{}},
  };
  return schedule;
}

}  // namespace

TEST_CASE("tensor codes: four-clause worked example") {
  const auto codes =
      derive_split_codes_tensor(parse_sequent("A, B, C, D |- D*(B*(A*C))"));
  REQUIRE(displays(codes) ==
          std::vector<std::string>{"110|00", "100|01", "111|10", "000|11"});
  REQUIRE(codes[0].atom.name == "A");
  REQUIRE(codes[3].atom.name == "D");
  for (const auto& c : codes) REQUIRE(c.width() == 5);  // (k-1) + log2 k
}

TEST_CASE("tensor codes: two clauses") {
  const auto codes = derive_split_codes_tensor(parse_sequent("A, B |- A*B"));
  REQUIRE(displays(codes) == std::vector<std::string>{"0|0", "1|1"});
  std::set<std::uint64_t> values = {codes[0].value(), codes[1].value()};
  REQUIRE(values == std::set<std::uint64_t>{0b00, 0b11});
}

TEST_CASE("tensor codes: general right tree") {
  const auto codes =
      derive_split_codes_tensor(parse_sequent("A, B, C, D |- (A*B)*(C*D)"));
  REQUIRE(displays(codes) ==
          std::vector<std::string>{"000|00", "010|01", "100|10", "101|11"});
  // oracle: a complete noiseless assignment decodes to the brute-force proof
  const Sequent s = parse_sequent("A, B, C, D |- (A*B)*(C*D)");
  const ProofTree tree = decode_assignment_tensor(full_assignment(codes), s);
  REQUIRE(check_proof(tree));
  auto brute = prove_bruteforce(s, Fragment::TensorOnly);
  REQUIRE(tree_equal(tree, *brute));
}

TEST_CASE("tensor codes: preconditions") {
  REQUIRE_THROWS_AS(derive_split_codes_tensor(parse_sequent("A, B |- A*C")),
                    AtomMismatchError);
  REQUIRE_THROWS_AS(derive_split_codes_tensor(parse_sequent("A*B |- A*B")),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(derive_split_codes_tensor(parse_sequent("A |- A")),
                    std::invalid_argument);
}

TEST_CASE("tensor code widths and index injectivity") {
  SeededRng gen(77);
  for (std::size_t k : {2, 3, 4, 6, 8}) {
    const auto perm = random_permutation(k, gen);
    const Sequent s = bench_sequent(k, perm);
    auto [saturated, steps] = saturate_tensor_left(s);
    const auto codes = derive_split_codes_tensor(saturated);
    std::set<std::string> indices;
    for (const auto& c : codes) {
      REQUIRE(c.split_bits.size() == k - 1);
      REQUIRE(c.index_bits.size() ==
              static_cast<std::size_t>(register_width(k)));
      indices.insert(c.index_bits);
    }
    REQUIRE(indices.size() == k);
  }
  // the advertised width arithmetic: 2^((k-1)+log2 k) / k = 2^(k-1)
  for (int logk = 1; logk <= 6; ++logk) {
    const std::size_t k = std::size_t{1} << logk;
    REQUIRE((k - 1) + logk - logk == k - 1);
  }
}

TEST_CASE("lolli codes: labelled two-step example, exact printed states") {
  const auto codes = derive_split_codes_lolli(
      parse_sequent("A1, A2 -o B1 |- C1 -o B2, C2"), labelled_example_schedule());
  const std::vector<std::string> want = {"0000|000", "0001|001", "0010|010",
                                         "0111|011", "0010|100", "0111|101"};
  REQUIRE(codes.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    REQUIRE(codes[i].display() == want[i]);
    REQUIRE(codes[i].width() == 7);  // 2 steps * 2 bits + 3 index bits
  }
  REQUIRE(codes[0].atom == Atom{"A", 1});
  REQUIRE(codes[3].atom == Atom{"B", 2});
  REQUIRE(codes[4].atom == Atom{"C", 1});
}

TEST_CASE("lolli codes: empty schedule leaves index bits only") {
  const auto codes = derive_split_codes_lolli(parse_sequent("A |- A"), {});
  REQUIRE(codes.size() == 2);
  REQUIRE(codes[0].step_bits.empty());
  REQUIRE(codes[0].index_bits == "0");
  REQUIRE(codes[1].index_bits == "1");
}

TEST_CASE("lolli codes: invalid schedule is rejected") {
  REQUIRE_THROWS_AS(
      derive_split_codes_lolli(parse_sequent("A |- A"),
                               {RuleApp{LolliRight{0}}}),
      RuleError);
  REQUIRE_THROWS_AS(
      derive_split_codes_lolli(parse_sequent("A, B |- A*B"),
                               {RuleApp{AxiomRule{}}}),
      std::invalid_argument);
}

TEST_CASE("run_split_search: exact amplification numbers for k=4") {
  const auto codes =
      derive_split_codes_tensor(parse_sequent("A, B, C, D |- D*(B*(A*C))"));
  std::vector<std::uint64_t> marked;
  for (const auto& c : codes) marked.push_back(c.value());
  SeededRng rng(3);
  auto [assignment, stats] = run_split_search(marked, 5, 2, 4, 200, rng);
  REQUIRE(stats.iterations_per_run == 2);  // floor(pi/4 sqrt(32/4))
  REQUIRE(std::abs(stats.marked_prob_premeasure -
                   std::pow(std::sin(5 * std::asin(std::sqrt(4.0 / 32.0))), 2.0)) <=
          1e-9);
  REQUIRE(std::abs(stats.marked_prob_premeasure - 0.9453) <= 1e-4);
  REQUIRE(assignment.complete);
  for (const auto& c : codes)
    REQUIRE(assignment.code_by_index.at(c.clause_pos) == c.value());
  REQUIRE(stats.accepted == 4);
  REQUIRE(stats.accepted + stats.rejected_unmarked + stats.rejected_duplicate ==
          static_cast<std::size_t>(stats.runs));
}

TEST_CASE("run_split_search: two-clause case sits at probability one half") {
  // one marked state in two cannot be amplified: the success probability is
  // exactly 1/2 at every iteration count
  const Preparation prep = prepare_uniform(2);
  const MarkedSetOracle oracle{2, {0b00, 0b11}};
  for (int iters = 0; iters <= 3; ++iters) {
    const StateVector s = run_grover(
        prep, [&](StateVector& v) { apply_marked_phase(v, oracle); }, iters);
    REQUIRE(std::abs(marked_probability(s, oracle.marked) - 0.5) <= 1e-12);
  }
  // collection still terminates because unmarked outcomes are rejected
  SeededRng rng(1);
  auto [assignment, stats] =
      run_split_search({0b00, 0b11}, 2, 1, 2, 200, rng);
  REQUIRE(assignment.complete);
  for (const auto& [index, code] : assignment.code_by_index)
    REQUIRE((code == 0b00 || code == 0b11));
}

TEST_CASE("run_split_search: zero budget fails immediately") {
  SeededRng rng(0);
  auto [assignment, stats] = run_split_search({0b11}, 2, 1, 1, 0, rng);
  REQUIRE_FALSE(assignment.complete);
  REQUIRE(stats.runs == 0);
}

TEST_CASE("run_split_search: accepted outcomes always come from the marked set") {
  SeededRng rng(12);
  // marking half the space pins the per-run success at 1/2, so unmarked
  // outcomes show up and must be rejected rather than collected
  const std::set<std::uint64_t> marked = {0b000, 0b011, 0b101, 0b110};
  auto [assignment, stats] =
      run_split_search({0b000, 0b011, 0b101, 0b110}, 3, 2, 4, 100, rng);
  REQUIRE(assignment.complete);
  for (const auto& [index, code] : assignment.code_by_index)
    REQUIRE(marked.count(code) == 1);
  REQUIRE(stats.rejected_unmarked > 0);
}

TEST_CASE("decode_assignment_tensor: worked example and the bad fill code") {
  const Sequent s = parse_sequent("A, B, C, D |- D*(B*(A*C))");
  const auto codes = derive_split_codes_tensor(s);
  const ProofTree tree = decode_assignment_tensor(full_assignment(codes), s);
  REQUIRE(check_proof(tree));
  REQUIRE(tree_equal(tree, *prove_bruteforce(s, Fragment::TensorOnly)));

  // the (printed) alternative D code 010|11 violates the 0-fill rule: D's
  // branch closes at the first split, yet a later bit is set
  SplitAssignment bad = full_assignment(codes);
  bad.code_by_index[3] = bits_to_index("01011");
  REQUIRE_THROWS_AS(decode_assignment_tensor(bad, s), DecodeError);

  SplitAssignment incomplete = full_assignment(codes);
  incomplete.code_by_index.erase(2);
  incomplete.complete = false;
  REQUIRE_THROWS_AS(decode_assignment_tensor(incomplete, s), DecodeError);
}

TEST_CASE("decode_assignment_tensor: two clauses") {
  const Sequent s = parse_sequent("A, B |- A*B");
  const auto codes = derive_split_codes_tensor(s);
  const ProofTree tree = decode_assignment_tensor(full_assignment(codes), s);
  REQUIRE(check_proof(tree));
  REQUIRE(node_count(tree) == 3);
}

TEST_CASE("decode_assignment_lolli: reproduces the two-step derivation") {
  const Sequent s = parse_sequent("A1, A2 -o B1 |- C1 -o B2, C2");
  const auto codes = derive_split_codes_lolli(s, labelled_example_schedule());
  SplitAssignment a;
  a.complete = true;
  for (const auto& c : codes) a.code_by_index[c.clause_rank] = c.value();

  const ProofTree tree = decode_assignment_lolli(a, s, labelled_example_schedule());
  REQUIRE(std::holds_alternative<LolliRight>(tree.rule));
  REQUIRE(tree.premises.size() == 1);
  const ProofTree& step2 = tree.premises[0];
  REQUIRE(std::holds_alternative<LolliLeft>(step2.rule));
  REQUIRE(step2.premises.size() == 2);
  REQUIRE(step2.premises[0].conclusion == parse_sequent("A1 |- A2"));
  REQUIRE(std::holds_alternative<AxiomRule>(step2.premises[0].rule));
  REQUIRE(step2.premises[1].conclusion == parse_sequent("B1, C1 |- B2, C2"));
  REQUIRE(std::holds_alternative<OpenLeaf>(step2.premises[1].rule));
  REQUIRE_FALSE(check_proof(tree));  // open branch: a derivation, not a proof

  // flipping one routing bit must be caught
  SplitAssignment bad = a;
  bad.code_by_index[0] = bits_to_index("0100") << 3 | 0;  // A1 step bits 0100
  REQUIRE_THROWS_AS(decode_assignment_lolli(bad, s, labelled_example_schedule()),
                    DecodeError);
}

TEST_CASE("prove_splitsearch: tensor pipeline end to end") {
  SeededRng rng(9);
  SplitSearchProof res =
      prove_splitsearch(parse_sequent("A*(B*(C*D)) |- D*(B*(A*C))"), rng);
  REQUIRE(check_proof(res.tree));
  REQUIRE(res.closed);
  REQUIRE(tree_equal(res.tree,
                     *prove_bruteforce(parse_sequent("A*(B*(C*D)) |- D*(B*(A*C))"),
                                       Fragment::TensorOnly)));
}

TEST_CASE("prove_splitsearch: simplest case within a small budget") {
  SeededRng rng(1);
  SplitSearchProof res = prove_splitsearch(parse_sequent("A, B |- A*B"), rng, 50);
  REQUIRE(check_proof(res.tree));
  REQUIRE(res.stats.runs <= 50);
}

TEST_CASE("prove_splitsearch: single clause needs no search") {
  SeededRng rng(0);
  SplitSearchProof res = prove_splitsearch(parse_sequent("A |- A"), rng);
  REQUIRE(check_proof(res.tree));
  REQUIRE(res.stats.runs == 0);
}

TEST_CASE("prove_splitsearch: mismatch fails before any quantum step") {
  SeededRng rng(0);
  REQUIRE_THROWS_AS(prove_splitsearch(parse_sequent("A |- B"), rng),
                    AtomMismatchError);
}

TEST_CASE("prove_splitsearch: zero budget surfaces a recovery error") {
  SeededRng rng(0);
  REQUIRE_THROWS_AS(prove_splitsearch(parse_sequent("A, B |- A*B"), rng, 0),
                    RecoveryError);
}

TEST_CASE("prove_splitsearch: provable implication sequent, exact recovery") {
  SeededRng rng(4);
  SplitSearchProof res = prove_splitsearch(parse_sequent("A -o B, A |- B"), rng);
  REQUIRE(res.closed);
  REQUIRE(check_proof(res.tree));
  // width 4, all four codes marked: N=16, M=4 is the exact Grover case
  REQUIRE(res.stats.width == 4);
  REQUIRE(std::abs(res.stats.marked_prob_premeasure - 1.0) <= 1e-9);
}

TEST_CASE("prove_splitsearch: implication proof with branching steps") {
  // the rule schedule branches after the split, so clauses in the sibling
  // branch must carry (0,0) fill at the steps they never reach
  const Sequent s = parse_sequent("A -o B, C -o D, A, C |- B*D");
  SeededRng rng(6);
  SplitSearchProof res = prove_splitsearch(s, rng);
  REQUIRE(res.closed);
  REQUIRE(check_proof(res.tree));
  REQUIRE(tree_equal(res.tree, *prove_bruteforce(s, Fragment::TensorLolli)));
  REQUIRE(res.stats.width == 9);  // 3 steps * 2 bits + 3 index bits
}

TEST_CASE("prove_splitsearch: tensor and implication mixed on the left") {
  const Sequent s = parse_sequent("A*(A -o B) |- B");
  SeededRng rng(8);
  SplitSearchProof res = prove_splitsearch(s, rng);
  REQUIRE(res.closed);
  REQUIRE(check_proof(res.tree));
  REQUIRE(res.stats.width == 6);  // 2 steps (one *-Left, one -o-Left) + 2 index bits
}

TEST_CASE("prove_splitsearch: unprovable implication sequent") {
  SeededRng rng(0);
  REQUIRE_THROWS_AS(
      prove_splitsearch(parse_sequent("A1, A2 -o B1 |- C1 -o B2, C2"), rng),
      NotProvableError);
}

TEST_CASE("derive/search/decode round trip equals brute force") {
  SeededRng gen(55);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t k = 2 + gen.below(5);
    const auto perm = random_permutation(k, gen);
    const Sequent s = bench_sequent(k, perm);
    SeededRng rng(gen.next_u64());
    SplitSearchProof res = prove_splitsearch(s, rng);
    REQUIRE(check_proof(res.tree));
    REQUIRE(tree_equal(res.tree, *prove_bruteforce(s, Fragment::TensorOnly)));
  }
}
