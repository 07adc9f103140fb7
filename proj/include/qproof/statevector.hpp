#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qproof/rng.hpp"

namespace qproof {

using cxd = std::complex<double>;

// Dense statevector over n qubits.
//
// Bit convention, fixed everywhere: qubit 0 is the MOST significant bit of
// the basis index, so the printed bitstring reads qubit 0 first and register
// concatenation |a>|b> lands on index a * 2^nb + b. |1100> is index 12.
struct StateVector {
  int n = 0;
  std::vector<cxd> amps;

  std::size_t dim() const { return amps.size(); }
};

inline constexpr int kMaxQubits = 24;

// Smallest register width holding k values (ceil(log2 k), at least 1).
inline int register_width(std::size_t k) {
  int n = 1;
  while ((std::size_t{1} << n) < k) ++n;
  return n;
}

inline StateVector new_state(int n) {
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument("new_state: qubit count out of range [1, 24]");
  StateVector s;
  s.n = n;
  s.amps.assign(std::size_t{1} << n, cxd{0.0, 0.0});
  s.amps[0] = cxd{1.0, 0.0};
  return s;
}

// Index bit holding qubit q under the qubit-0-first convention.
inline std::uint64_t qubit_mask(int n, int q) {
  return std::uint64_t{1} << (n - 1 - q);
}

inline std::string index_to_bits(std::uint64_t idx, int n) {
  std::string out(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q)
    if (idx & qubit_mask(n, q)) out[static_cast<std::size_t>(q)] = '1';
  return out;
}

inline std::uint64_t bits_to_index(const std::string& bits) {
  std::uint64_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bits_to_index: bad bit");
    idx = (idx << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return idx;
}

struct Gate {
  enum class Kind { X, H, Z, MCX };
  Kind kind = Kind::X;
  int target = 0;
  std::vector<int> controls;  // MCX only

  static Gate x(int q) { return {Kind::X, q, {}}; }
  static Gate h(int q) { return {Kind::H, q, {}}; }
  static Gate z(int q) { return {Kind::Z, q, {}}; }
  static Gate mcx(std::vector<int> controls, int target) {
    return {Kind::MCX, target, std::move(controls)};
  }
};

struct Circuit {
  int n = 0;
  std::vector<Gate> gates;
};

namespace detail {

inline void check_qubit(const StateVector& s, int q, const char* what) {
  if (q < 0 || q >= s.n)
    throw std::invalid_argument(std::string(what) + ": qubit index out of range");
}

}  // namespace detail

inline void apply_gate(StateVector& s, const Gate& g) {
  detail::check_qubit(s, g.target, "apply_gate");
  const std::uint64_t tmask = qubit_mask(s.n, g.target);
  switch (g.kind) {
    case Gate::Kind::X: {
      for (std::uint64_t i = 0; i < s.dim(); ++i)
        if (!(i & tmask)) std::swap(s.amps[i], s.amps[i | tmask]);
      break;
    }
    case Gate::Kind::H: {
      const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
      for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (i & tmask) continue;
        const cxd a = s.amps[i];
        const cxd b = s.amps[i | tmask];
        s.amps[i] = (a + b) * inv_sqrt2;
        s.amps[i | tmask] = (a - b) * inv_sqrt2;
      }
      break;
    }
    case Gate::Kind::Z: {
      for (std::uint64_t i = 0; i < s.dim(); ++i)
        if (i & tmask) s.amps[i] = -s.amps[i];
      break;
    }
    case Gate::Kind::MCX: {
      std::uint64_t cmask = 0;
      for (int c : g.controls) {
        detail::check_qubit(s, c, "apply_gate");
        if (c == g.target)
          throw std::invalid_argument("apply_gate: control equals target");
        cmask |= qubit_mask(s.n, c);
      }
      for (std::uint64_t i = 0; i < s.dim(); ++i)
        if ((i & cmask) == cmask && !(i & tmask))
          std::swap(s.amps[i], s.amps[i | tmask]);
      break;
    }
  }
}

inline void apply_circuit(StateVector& s, const Circuit& c) {
  if (c.n != s.n) throw std::invalid_argument("apply_circuit: size mismatch");
  for (const Gate& g : c.gates) apply_gate(s, g);
}

// Multi-controlled X as a Toffoli ladder over clean ancillas: AND the
// controls pairwise into the ancillas, one Toffoli onto the target, then
// uncompute so every ancilla returns to |0>. Needs m-2 ancillas and emits
// 2(m-2)+1 Toffolis for m controls.
inline Circuit decompose_mcx(int n, const std::vector<int>& controls, int target,
                             const std::vector<int>& ancillas) {
  const std::size_t m = controls.size();
  if (m < 3)
    throw std::invalid_argument("decompose_mcx: needs at least 3 controls");
  if (ancillas.size() < m - 2)
    throw std::invalid_argument("decompose_mcx: insufficient ancillas");
  Circuit c;
  c.n = n;
  std::vector<Gate> compute;
  compute.push_back(Gate::mcx({controls[0], controls[1]}, ancillas[0]));
  for (std::size_t i = 2; i + 1 < m; ++i)
    compute.push_back(Gate::mcx({controls[i], ancillas[i - 2]}, ancillas[i - 1]));
  c.gates = compute;
  c.gates.push_back(Gate::mcx({controls[m - 1], ancillas[m - 3]}, target));
  for (auto it = compute.rbegin(); it != compute.rend(); ++it) c.gates.push_back(*it);
  return c;
}

inline double norm(const StateVector& s) {
  double acc = 0.0;
  for (const cxd& a : s.amps) acc += std::norm(a);
  return std::sqrt(acc);
}

// Marginal Born probabilities of an ordered qubit subset; outcomes with zero
// probability are omitted. Bitstrings read the subset in the given order.
inline std::map<std::string, double> probabilities(const StateVector& s,
                                                   const std::vector<int>& qubits) {
  for (int q : qubits) detail::check_qubit(s, q, "probabilities");
  std::map<std::string, double> out;
  for (std::uint64_t i = 0; i < s.dim(); ++i) {
    const double p = std::norm(s.amps[i]);
    if (p == 0.0) continue;
    std::string key(qubits.size(), '0');
    for (std::size_t j = 0; j < qubits.size(); ++j)
      if (i & qubit_mask(s.n, qubits[j])) key[j] = '1';
    out[key] += p;
  }
  return out;
}

// Multinomial sampling by inverse CDF over outcomes in ascending bitstring
// order; one rng draw per shot.
inline std::map<std::string, std::uint64_t> sample(const StateVector& s,
                                                   const std::vector<int>& qubits,
                                                   std::uint64_t shots,
                                                   SeededRng& rng) {
  if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
  const auto probs = probabilities(s, qubits);
  std::vector<std::pair<std::string, double>> cdf;
  cdf.reserve(probs.size());
  double acc = 0.0;
  for (const auto& [key, p] : probs) {
    acc += p;
    cdf.emplace_back(key, acc);
  }
  std::map<std::string, std::uint64_t> hist;
  for (std::uint64_t t = 0; t < shots; ++t) {
    const double u = rng.next_double() * acc;
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf[mid].second > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    ++hist[cdf[lo].first];
  }
  return hist;
}

// Samples one outcome on the subset and collapses the state onto it,
// renormalized. Returns the outcome bitstring.
inline std::string measure_collapse(StateVector& s, const std::vector<int>& qubits,
                                    SeededRng& rng) {
  const auto probs = probabilities(s, qubits);
  const double u = rng.next_double();
  double acc = 0.0;
  std::string outcome = probs.rbegin()->first;
  for (const auto& [key, p] : probs) {
    acc += p;
    if (u < acc) {
      outcome = key;
      break;
    }
  }
  std::uint64_t mask = 0, want = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    mask |= qubit_mask(s.n, qubits[j]);
    if (outcome[j] == '1') want |= qubit_mask(s.n, qubits[j]);
  }
  double kept = 0.0;
  for (std::uint64_t i = 0; i < s.dim(); ++i) {
    if ((i & mask) != want)
      s.amps[i] = cxd{0.0, 0.0};
    else
      kept += std::norm(s.amps[i]);
  }
  const double scale = 1.0 / std::sqrt(kept);
  for (cxd& a : s.amps) a *= scale;
  return outcome;
}

}  // namespace qproof
