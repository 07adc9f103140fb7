#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "qproof/grover.hpp"
#include "qproof/rng.hpp"
#include "qproof/statevector.hpp"

using namespace qproof;

namespace {

StateVector basis_state(int n, std::uint64_t index) {
  StateVector s = new_state(n);
  s.amps[0] = cxd{0, 0};
  s.amps[index] = cxd{1, 0};
  return s;
}

StateVector random_state(int n, SeededRng& rng) {
  StateVector s = new_state(n);
  double nrm = 0;
  for (auto& a : s.amps) {
    a = cxd{rng.next_double() - 0.5, rng.next_double() - 0.5};
    nrm += std::norm(a);
  }
  for (auto& a : s.amps) a /= std::sqrt(nrm);
  return s;
}

double dist(const StateVector& a, const StateVector& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) d += std::norm(a.amps[i] - b.amps[i]);
  return std::sqrt(d);
}

// the worked-example database state over pairs {2, 5, 11, 12}
StateVector worked_example_db() {
  return prepare_basis_set(make_basis_set(4, {2, 5, 11, 12})).initial_state();
}

}  // namespace

TEST_CASE("new_state: |0...0> and range checks") {
  StateVector s1 = new_state(1);
  REQUIRE(s1.amps[0] == cxd{1, 0});
  REQUIRE(s1.amps[1] == cxd{0, 0});
  StateVector s4 = new_state(4);
  REQUIRE(s4.dim() == 16);
  REQUIRE(s4.amps[0] == cxd{1, 0});
  REQUIRE_THROWS_AS(new_state(0), std::invalid_argument);
  REQUIRE_THROWS_AS(new_state(25), std::invalid_argument);
}

TEST_CASE("apply_gate: X, H, Z basics") {
  StateVector s = new_state(1);
  apply_gate(s, Gate::x(0));
  REQUIRE(s.amps[1] == cxd{1, 0});

  StateVector h = new_state(1);
  apply_gate(h, Gate::h(0));
  REQUIRE(std::abs(h.amps[0].real() - 1 / std::sqrt(2.0)) < 1e-12);
  REQUIRE(std::abs(h.amps[1].real() - 1 / std::sqrt(2.0)) < 1e-12);

  apply_gate(h, Gate::z(0));
  REQUIRE(std::abs(h.amps[1].real() + 1 / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("apply_gate: qubit 0 is the most significant bit") {
  StateVector s = new_state(4);
  apply_gate(s, Gate::x(0));
  apply_gate(s, Gate::x(1));
  REQUIRE(s.amps[12] == cxd{1, 0});  // |1100> = 12
  REQUIRE(index_to_bits(12, 4) == "1100");
  REQUIRE(bits_to_index("1100") == 12);
}

TEST_CASE("apply_gate: MCX flips only when all controls are set") {
  StateVector s = basis_state(3, bits_to_index("110"));
  apply_gate(s, Gate::mcx({0, 1}, 2));
  REQUIRE(s.amps[bits_to_index("111")] == cxd{1, 0});

  StateVector t = basis_state(3, bits_to_index("010"));
  apply_gate(t, Gate::mcx({0, 1}, 2));
  REQUIRE(t.amps[bits_to_index("010")] == cxd{1, 0});

  REQUIRE_THROWS_AS(apply_gate(s, Gate::mcx({2}, 2)), std::invalid_argument);
  REQUIRE_THROWS_AS(apply_gate(s, Gate::x(3)), std::invalid_argument);
}

TEST_CASE("gate involutions on a random state") {
  SeededRng rng(3);
  StateVector s = random_state(4, rng);
  for (const Gate& g : {Gate::x(2), Gate::h(1), Gate::z(0), Gate::mcx({0, 3}, 2)}) {
    StateVector t = s;
    apply_gate(t, g);
    apply_gate(t, g);
    REQUIRE(dist(t, s) < 1e-12);
  }
}

TEST_CASE("decompose_mcx: ladder sizes and preconditions") {
  REQUIRE(decompose_mcx(5, {0, 1, 2}, 3, {4}).gates.size() == 3);
  REQUIRE(decompose_mcx(7, {0, 1, 2, 3}, 4, {5, 6}).gates.size() == 5);
  REQUIRE_THROWS_AS(decompose_mcx(4, {0, 1}, 2, {3}), std::invalid_argument);
  REQUIRE_THROWS_AS(decompose_mcx(5, {0, 1, 2}, 3, {}), std::invalid_argument);
}

TEST_CASE("decompose_mcx equals native MCX on every basis state") {
  for (int m = 3; m <= 6; ++m) {
    const int n = 2 * m - 1;
    std::vector<int> controls(m), ancillas(m - 2);
    for (int i = 0; i < m; ++i) controls[i] = i;
    for (int i = 0; i < m - 2; ++i) ancillas[i] = m + 1 + i;
    const Circuit ladder = decompose_mcx(n, controls, m, ancillas);
    const std::uint64_t anc_mask = (std::uint64_t{1} << (m - 2)) - 1;
    for (std::uint64_t basis = 0; basis < (std::uint64_t{1} << (m + 1)); ++basis) {
      StateVector a = basis_state(n, basis << (m - 2));
      StateVector b = a;
      apply_circuit(a, ladder);
      apply_gate(b, Gate::mcx(controls, m));
      REQUIRE(dist(a, b) == 0.0);  // Toffoli ladders are permutation-exact
      for (std::uint64_t i = 0; i < a.dim(); ++i)
        if (i & anc_mask) REQUIRE(std::norm(a.amps[i]) == 0.0);
    }
  }
}

TEST_CASE("probabilities: marginals") {
  const auto p1 = probabilities(basis_state(4, 12), {0, 1});
  REQUIRE(p1.size() == 1);
  REQUIRE(p1.at("11") == 1.0);

  const auto p2 = probabilities(worked_example_db(), {0, 1});
  REQUIRE(p2.size() == 4);
  for (const char* key : {"00", "01", "10", "11"})
    REQUIRE(std::abs(p2.at(key) - 0.25) < 1e-12);

  StateVector plus = new_state(1);
  apply_gate(plus, Gate::h(0));
  const auto p3 = probabilities(plus, {0});
  REQUIRE(std::abs(p3.at("0") - 0.5) < 1e-12);
  REQUIRE(std::abs(p3.at("1") - 0.5) < 1e-12);
}

TEST_CASE("probabilities sum to one") {
  SeededRng rng(8);
  for (int n = 2; n <= 6; ++n) {
    StateVector s = random_state(n, rng);
    double total = 0;
    for (const auto& [key, p] : probabilities(s, {0, 1})) total += p;
    REQUIRE(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("sample: deterministic point mass") {
  SeededRng rng(1);
  const auto hist = sample(basis_state(3, bits_to_index("101")), {0, 1, 2}, 100, rng);
  REQUIRE(hist.size() == 1);
  REQUIRE(hist.at("101") == 100);
}

TEST_CASE("sample: uniform two-qubit state, binomial concentration") {
  StateVector s = new_state(2);
  apply_gate(s, Gate::h(0));
  apply_gate(s, Gate::h(1));
  SeededRng rng(42);
  const auto hist = sample(s, {0, 1}, 1000, rng);
  std::uint64_t total = 0;
  for (const char* key : {"00", "01", "10", "11"}) {
    const auto it = hist.find(key);
    REQUIRE(it != hist.end());
    REQUIRE(it->second >= 190);  // 250 +- 60 (4 sigma)
    REQUIRE(it->second <= 310);
    total += it->second;
  }
  REQUIRE(total == 1000);
}

TEST_CASE("sample: identical seeds give identical histograms") {
  StateVector s = worked_example_db();
  SeededRng r1(7), r2(7), r3(8);
  const auto h1 = sample(s, {0, 1, 2, 3}, 500, r1);
  const auto h2 = sample(s, {0, 1, 2, 3}, 500, r2);
  REQUIRE(h1 == h2);
  const auto h3 = sample(s, {0, 1, 2, 3}, 500, r3);
  REQUIRE(h3 != h1);  // different stream, different draw
}

TEST_CASE("sample: frequencies converge at 1e4 shots") {
  SeededRng state_rng(12);
  StateVector s = random_state(4, state_rng);
  const std::vector<int> all = {0, 1, 2, 3};
  const auto probs = probabilities(s, all);
  SeededRng rng(55);
  const auto hist = sample(s, all, 10000, rng);
  for (const auto& [key, p] : probs) {
    const auto it = hist.find(key);
    const double freq = it == hist.end() ? 0.0 : it->second / 10000.0;
    REQUIRE(std::abs(freq - p) <= 0.02);
  }
}

TEST_CASE("measure_collapse: deterministic outcome") {
  StateVector s = basis_state(2, 3);
  SeededRng rng(0);
  REQUIRE(measure_collapse(s, {0}, rng) == "1");
  REQUIRE(s.amps[3] == cxd{1, 0});
}

TEST_CASE("measure_collapse: pair database collapses to the partner") {
  // measuring the right register at value b leaves |a b> for the paired a;
  // in particular outcome "00" collapses to |1100>, the D = (3, 0) pair
  const std::map<std::string, std::uint64_t> partner = {
      {"00", 12}, {"01", 5}, {"10", 2}, {"11", 11}};
  std::map<std::string, int> seen;
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    StateVector s = worked_example_db();
    SeededRng rng(seed);
    const std::string b = measure_collapse(s, {2, 3}, rng);
    ++seen[b];
    REQUIRE(std::abs(std::norm(s.amps[partner.at(b)]) - 1.0) < 1e-12);
  }
  REQUIRE(seen.size() == 4);  // every branch exercised, incl. "00" -> |1100>
}

TEST_CASE("measure_collapse: Bell-like state") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    StateVector s = new_state(2);
    apply_gate(s, Gate::h(0));
    apply_gate(s, Gate::mcx({0}, 1));
    SeededRng rng(seed);
    const std::string bit = measure_collapse(s, {0}, rng);
    const std::uint64_t want = bit == "0" ? 0 : 3;
    REQUIRE(std::abs(std::norm(s.amps[want]) - 1.0) < 1e-12);
  }
}

TEST_CASE("norm preserved across long random gate sequences") {
  SeededRng rng(2718);
  StateVector s = new_state(12);
  for (int q = 0; q < 12; ++q) apply_gate(s, Gate::h(q));
  for (int i = 0; i < 1000; ++i) {
    const int q = static_cast<int>(rng.below(12));
    switch (rng.below(4)) {
      case 0: apply_gate(s, Gate::x(q)); break;
      case 1: apply_gate(s, Gate::h(q)); break;
      case 2: apply_gate(s, Gate::z(q)); break;
      default: {
        int c = static_cast<int>(rng.below(12));
        if (c == q) c = (c + 1) % 12;
        apply_gate(s, Gate::mcx({c}, q));
        break;
      }
    }
  }
  REQUIRE(std::abs(norm(s) - 1.0) <= 1e-10);
}

TEST_CASE("rng: substreams are independent and reproducible") {
  SeededRng a(9), b(9);
  REQUIRE(a.next_u64() == b.next_u64());
  SeededRng c = SeededRng(9).substream(0);
  SeededRng d = SeededRng(9).substream(1);
  REQUIRE(c.next_u64() != d.next_u64());
  SeededRng e = SeededRng(9).substream(0);
  REQUIRE(SeededRng(9).substream(0).next_u64() == e.next_u64());
}
