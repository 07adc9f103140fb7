#pragma once

#include <cmath>
#include <functional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "qproof/report.hpp"

namespace qproof {

// Fast cross-module invariant checks behind `qproof selftest`. Each check
// throws or returns false on violation; the runner prints one line per check
// and returns the failure count.
namespace selftest {

inline FormulaPtr random_formula(SeededRng& rng, int depth,
                                 const std::vector<std::string>& names) {
  if (depth == 0 || rng.below(3) == 0)
    return Formula::atom(Atom{names[rng.below(names.size())], 0});
  FormulaPtr l = random_formula(rng, depth - 1, names);
  FormulaPtr r = random_formula(rng, depth - 1, names);
  return rng.below(4) == 0 ? Formula::lolli(l, r) : Formula::tensor(l, r);
}

inline bool parse_roundtrip() {
  for (const char* text :
       {"A |- A", "A*(B*(C*D)) |- D*(B*(A*C))", "A1, A2 -o B1 |- C1 -o B2, C2",
        "(A*B)*(C*D) |- D*(C*(B*A))"}) {
    const Sequent s = parse_sequent(text);
    if (parse_sequent(render_sequent(s)) != s) return false;
  }
  SeededRng rng(2024);
  const std::vector<std::string> names = {"A", "B", "C", "Dx"};
  for (int i = 0; i < 200; ++i) {
    Sequent s;
    s.left.push_back(random_formula(rng, 4, names));
    s.right.push_back(random_formula(rng, 4, names));
    Sequent reparsed = parse_sequent(render_sequent(parse_sequent(render_sequent(s))));
    if (reparsed != parse_sequent(render_sequent(s))) return false;
  }
  return true;
}

inline bool simulator_gates() {
  StateVector s = new_state(2);
  apply_gate(s, Gate::x(0));
  if (std::abs(s.amps[2].real() - 1.0) > 1e-12) return false;
  apply_gate(s, Gate::h(1));
  apply_gate(s, Gate::z(1));
  apply_gate(s, Gate::h(1));  // HZH = X
  if (std::abs(s.amps[3].real() - 1.0) > 1e-12) return false;

  SeededRng rng(7);
  StateVector t = new_state(10);
  for (int q = 0; q < 10; ++q) apply_gate(t, Gate::h(q));
  for (int i = 0; i < 1000; ++i) {
    const int q = static_cast<int>(rng.below(10));
    switch (rng.below(4)) {
      case 0: apply_gate(t, Gate::x(q)); break;
      case 1: apply_gate(t, Gate::h(q)); break;
      case 2: apply_gate(t, Gate::z(q)); break;
      default: {
        const int c = static_cast<int>(rng.below(10));
        if (c != q) apply_gate(t, Gate::mcx({c}, q));
        break;
      }
    }
  }
  return std::abs(norm(t) - 1.0) <= 1e-10;
}

inline bool mcx_decomposition() {
  for (int m = 3; m <= 5; ++m) {
    const int n = 2 * m - 1;  // m controls, target, m-2 ancillas
    std::vector<int> controls(m), ancillas(m - 2);
    for (int i = 0; i < m; ++i) controls[i] = i;
    for (int i = 0; i < m - 2; ++i) ancillas[i] = m + 1 + i;
    const Circuit ladder = decompose_mcx(n, controls, m, ancillas);
    if (ladder.gates.size() != std::size_t(2 * (m - 2) + 1)) return false;
    const std::uint64_t anc_mask = (std::uint64_t{1} << (m - 2)) - 1;
    for (std::uint64_t basis = 0; basis < (std::uint64_t{1} << (m + 1)); ++basis) {
      StateVector a = new_state(n);
      a.amps[0] = 0;
      a.amps[basis << (m - 2)] = 1;  // ancillas clean
      StateVector b = a;
      apply_circuit(a, ladder);
      apply_gate(b, Gate::mcx(controls, m));
      for (std::uint64_t i = 0; i < a.dim(); ++i) {
        if (std::abs(a.amps[i] - b.amps[i]) > 1e-12) return false;
        if ((i & anc_mask) && std::norm(a.amps[i]) > 1e-24) return false;
      }
    }
  }
  return true;
}

inline bool closed_form_grover() {
  const struct {
    std::size_t db, marked;
    int iters;
  } cases[] = {{4, 1, 1}, {8, 1, 2}, {64, 1, 6}, {3, 1, 1}};
  for (const auto& c : cases) {
    const int n = register_width(c.db);
    std::vector<std::uint64_t> states(c.db);
    for (std::size_t i = 0; i < c.db; ++i) states[i] = i;
    Preparation prep = prepare_basis_set(make_basis_set(n, states));
    MarkedSetOracle oracle{n, {0}};
    StateVector s = run_grover(
        prep, [&](StateVector& v) { apply_marked_phase(v, oracle); }, c.iters);
    const double theta = std::asin(std::sqrt(1.0 / static_cast<double>(c.db)));
    const double want = std::pow(std::sin((2.0 * c.iters + 1.0) * theta), 2.0);
    if (std::abs(marked_probability(s, oracle.marked) - want) > 1e-9) return false;
  }
  return true;
}

inline bool pattern_oracle_forms() {
  for (int n = 2; n <= 5; ++n) {
    SeededRng rng(100 + n);
    PatternOracle o{n, {}, {}};
    for (int q = 0; q < n; ++q)
      if (rng.below(2)) {
        o.reg.push_back(q);
        o.pattern += rng.below(2) ? '1' : '0';
      }
    if (o.reg.empty()) {
      o.reg.push_back(0);
      o.pattern = "1";
    }
    StateVector data = new_state(n);
    for (int q = 0; q < n; ++q) apply_gate(data, Gate::h(q));
    StateVector diag = data;
    apply_pattern_phase(diag, o);

    const Circuit circ = build_pattern_oracle(o, o.reg.size() >= 3);
    StateVector full = new_state(circ.n);
    full.amps.assign(full.dim(), cxd{0, 0});
    for (std::uint64_t i = 0; i < data.dim(); ++i)
      full.amps[i << (circ.n - n)] = data.amps[i];
    prepare_kickback(full, n);
    apply_circuit(full, circ);
    // undo |-> and compare the data register
    apply_gate(full, Gate::h(n));
    apply_gate(full, Gate::x(n));
    for (std::uint64_t i = 0; i < data.dim(); ++i)
      if (std::abs(full.amps[i << (circ.n - n)] - diag.amps[i]) > 1e-12)
        return false;
  }
  return true;
}

inline bool pairdb_worked_example() {
  const Sequent s = parse_sequent("A*(B*(C*D)) |- D*(B*(A*C))");
  SeededRng rng(7);
  PairDbProof res = prove_pairdb(s, rng, 1000);
  if (res.permutation != std::vector<std::size_t>{3, 1, 0, 2}) return false;
  if (!check_proof(res.tree)) return false;
  for (double p : res.stats.premeasure_target_prob)
    if (std::abs(p - 1.0) > 1e-9) return false;
  return res.stats.oracle_calls == 4;
}

inline bool splitsearch_codes() {
  const Sequent s = parse_sequent("A, B, C, D |- D*(B*(A*C))");
  const auto codes = derive_split_codes_tensor(s);
  const std::set<std::string> got = {codes[0].display(), codes[1].display(),
                                     codes[2].display(), codes[3].display()};
  const std::set<std::string> want = {"110|00", "100|01", "111|10", "000|11"};
  if (got != want) return false;

  // a D-code with a nonzero bit after its branch closed must fail decoding
  SplitAssignment bad;
  bad.complete = true;
  for (const auto& c : codes)
    bad.code_by_index[c.clause_pos] =
        c.atom.name == "D" ? bits_to_index("01011") : c.value();
  try {
    decode_assignment_tensor(bad, s);
    return false;
  } catch (const DecodeError&) {
  }

  SplitAssignment good;
  good.complete = true;
  for (const auto& c : codes) good.code_by_index[c.clause_pos] = c.value();
  return check_proof(decode_assignment_tensor(good, s));
}

inline bool lolli_codes() {
  const Sequent s = parse_sequent("A1, A2 -o B1 |- C1 -o B2, C2");
  const std::vector<RuleApp> schedule = {
      RuleApp{LolliRight{0}},
      RuleApp{LolliLeft{1, {0, 0, 1}, {1, 1}}},
      RuleApp{AxiomRule{}},
      RuleApp{OpenLeaf{}},
  };
  const auto codes = derive_split_codes_lolli(s, schedule);
  const std::vector<std::string> want = {"0000|000", "0001|001", "0010|010",
                                         "0111|011", "0010|100", "0111|101"};
  if (codes.size() != want.size()) return false;
  for (std::size_t i = 0; i < want.size(); ++i)
    if (codes[i].display() != want[i]) return false;
  return true;
}

inline bool report_determinism() {
  ProveOptions opt;
  opt.sequent = "A*(B*(C*D)) |- D*(B*(A*C))";
  opt.method = Method::PairDb;
  opt.seed = 11;
  const std::string a = run_prove(opt).report.dump(2);
  const std::string b = run_prove(opt).report.dump(2);
  return !a.empty() && a == b;
}

inline int run_all(std::ostream& os) {
  const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"parse-roundtrip", parse_roundtrip},
      {"simulator-gates", simulator_gates},
      {"mcx-decomposition", mcx_decomposition},
      {"closed-form-grover", closed_form_grover},
      {"pattern-oracle-forms", pattern_oracle_forms},
      {"pairdb-worked-example", pairdb_worked_example},
      {"splitsearch-codes", splitsearch_codes},
      {"lolli-codes", lolli_codes},
      {"report-determinism", report_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      os << "FAIL " << name << " (" << e.what() << ")\n";
      ++failures;
      continue;
    }
    if (ok) {
      os << "ok   " << name << "\n";
    } else {
      os << "FAIL " << name << "\n";
      ++failures;
    }
  }
  return failures;
}

}  // namespace selftest
}  // namespace qproof
