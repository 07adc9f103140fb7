#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qproof/statevector.hpp"

namespace qproof {

// Equal-amplitude superposition over an explicit set of basis states.
struct BasisSet {
  int n = 0;
  std::vector<std::uint64_t> states;  // sorted, distinct
};

inline BasisSet make_basis_set(int n, std::vector<std::uint64_t> states) {
  if (states.empty()) throw std::invalid_argument("basis set: empty");
  std::sort(states.begin(), states.end());
  if (std::adjacent_find(states.begin(), states.end()) != states.end())
    throw std::invalid_argument("basis set: duplicate state");
  if (states.back() >> n)
    throw std::invalid_argument("basis set: state out of range");
  return BasisSet{n, std::move(states)};
}

// The preparation operator A with A|0...0> = psi, realized as the Householder
// reflection through psi - |0...0| normalized. That is an exact, self-inverse
// unitary completion of psi, so storing the reflection vector stores both A
// and its inverse; the amplified reflection 2|psi><psi| - I is applied
// directly from psi.
class Preparation {
 public:
  Preparation(int n, std::vector<cxd> psi) : n_(n), psi_(std::move(psi)) {
    v_ = psi_;
    v_[0] -= cxd{1.0, 0.0};
    v2_ = 0.0;
    for (const cxd& x : v_) v2_ += std::norm(x);
  }

  int qubits() const { return n_; }
  const std::vector<cxd>& psi() const { return psi_; }

  StateVector initial_state() const {
    StateVector s;
    s.n = n_;
    s.amps = psi_;
    return s;
  }

  // A (and, being a reflection, also its inverse).
  void apply_a(StateVector& s) const {
    if (s.n != n_) throw std::invalid_argument("apply_a: size mismatch");
    if (v2_ < 1e-24) return;  // psi == |0...0>
    cxd dot{0.0, 0.0};
    for (std::size_t i = 0; i < s.amps.size(); ++i)
      dot += std::conj(v_[i]) * s.amps[i];
    const cxd f = 2.0 * dot / v2_;
    for (std::size_t i = 0; i < s.amps.size(); ++i) s.amps[i] -= f * v_[i];
  }
  void apply_a_inverse(StateVector& s) const { apply_a(s); }

  // Inversion about the prepared state: 2|psi><psi| - I.
  void reflect(StateVector& s) const {
    if (s.n != n_) throw std::invalid_argument("reflect: size mismatch");
    cxd dot{0.0, 0.0};
    for (std::size_t i = 0; i < s.amps.size(); ++i)
      dot += std::conj(psi_[i]) * s.amps[i];
    const cxd f = 2.0 * dot;
    for (std::size_t i = 0; i < s.amps.size(); ++i)
      s.amps[i] = f * psi_[i] - s.amps[i];
  }

 private:
  int n_;
  std::vector<cxd> psi_;
  std::vector<cxd> v_;
  double v2_;
};

inline Preparation prepare_basis_set(const BasisSet& b) {
  std::vector<cxd> psi(std::size_t{1} << b.n, cxd{0.0, 0.0});
  const double amp = 1.0 / std::sqrt(static_cast<double>(b.states.size()));
  for (std::uint64_t s : b.states) psi[s] = cxd{amp, 0.0};
  return Preparation(b.n, std::move(psi));
}

inline Preparation prepare_uniform(int n) {
  std::vector<cxd> psi(std::size_t{1} << n,
                       cxd{1.0 / std::sqrt(static_cast<double>(std::size_t{1} << n)), 0.0});
  return Preparation(n, std::move(psi));
}

// Number of amplification rounds, floor(pi/4 * sqrt(N/M)).
inline int grover_iterations(std::uint64_t search_space, std::uint64_t marked) {
  if (marked < 1 || marked > search_space)
    throw std::invalid_argument("grover_iterations: need 1 <= M <= N");
  const double ratio = static_cast<double>(search_space) / static_cast<double>(marked);
  return static_cast<int>(std::floor(std::acos(-1.0) / 4.0 * std::sqrt(ratio)));
}

// Phase oracle that recognizes one bit pattern on a qubit subset.
struct PatternOracle {
  int n = 0;                // data qubits
  std::vector<int> reg;     // ordered qubit subset the pattern lives on
  std::string pattern;      // one bit per reg entry
};

// Diagonal form: negates every basis amplitude whose reg bits equal the
// pattern. Exactly the data-register action of the kickback circuit below.
inline void apply_pattern_phase(StateVector& s, const PatternOracle& o) {
  if (o.pattern.size() != o.reg.size())
    throw std::invalid_argument("pattern oracle: pattern width mismatch");
  std::uint64_t mask = 0, want = 0;
  for (std::size_t j = 0; j < o.reg.size(); ++j) {
    mask |= qubit_mask(s.n, o.reg[j]);
    if (o.pattern[j] == '1') want |= qubit_mask(s.n, o.reg[j]);
  }
  for (std::uint64_t i = 0; i < s.dim(); ++i)
    if ((i & mask) == want) s.amps[i] = -s.amps[i];
}

// Circuit form: X on every reg qubit whose pattern bit is 0, a
// multi-controlled X onto a kickback ancilla held in |->, undo the X gates.
// Layout: data qubits 0..n-1, kickback ancilla n, then any ladder ancillas.
// With `decompose` the MCX becomes the Toffoli ladder (|reg| >= 3).
inline Circuit build_pattern_oracle(const PatternOracle& o, bool decompose = false) {
  if (o.pattern.size() != o.reg.size())
    throw std::invalid_argument("pattern oracle: pattern width mismatch");
  const int kickback = o.n;
  const std::size_t m = o.reg.size();
  const bool ladder = decompose && m >= 3;
  Circuit c;
  c.n = o.n + 1 + (ladder ? static_cast<int>(m) - 2 : 0);
  std::vector<Gate> flips;
  for (std::size_t j = 0; j < m; ++j)
    if (o.pattern[j] == '0') flips.push_back(Gate::x(o.reg[j]));
  c.gates = flips;
  if (ladder) {
    std::vector<int> ancillas;
    for (std::size_t a = 0; a + 2 < m; ++a)
      ancillas.push_back(o.n + 1 + static_cast<int>(a));
    Circuit mcx = decompose_mcx(c.n, o.reg, kickback, ancillas);
    c.gates.insert(c.gates.end(), mcx.gates.begin(), mcx.gates.end());
  } else {
    c.gates.push_back(Gate::mcx(o.reg, kickback));
  }
  c.gates.insert(c.gates.end(), flips.begin(), flips.end());
  return c;
}

// Puts |-> = (|0> - |1>)/sqrt(2) on the kickback ancilla: X then H.
inline void prepare_kickback(StateVector& s, int qubit) {
  apply_gate(s, Gate::x(qubit));
  apply_gate(s, Gate::h(qubit));
}

// Phase oracle over an explicit marked set of basis indices.
struct MarkedSetOracle {
  int n = 0;
  std::set<std::uint64_t> marked;
};

inline void apply_marked_phase(StateVector& s, const MarkedSetOracle& o) {
  for (std::uint64_t m : o.marked) {
    if (m >> s.n) throw std::invalid_argument("marked oracle: state out of range");
    s.amps[m] = -s.amps[m];
  }
}

// The amplification loop: `iters` rounds of oracle followed by inversion
// about the prepared state, starting from it.
inline StateVector run_grover(const Preparation& prep,
                              const std::function<void(StateVector&)>& oracle,
                              int iters) {
  StateVector s = prep.initial_state();
  for (int i = 0; i < iters; ++i) {
    oracle(s);
    prep.reflect(s);
  }
  return s;
}

inline double marked_probability(const StateVector& s,
                                 const std::set<std::uint64_t>& marked) {
  double p = 0.0;
  for (std::uint64_t m : marked) p += std::norm(s.amps[m]);
  return p;
}

}  // namespace qproof
