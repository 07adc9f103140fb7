#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qproof/classical.hpp"
#include "qproof/pairdb.hpp"
#include "qproof/parse.hpp"
#include "qproof/proof.hpp"
#include "qproof/splitsearch.hpp"

namespace qproof {

using ordered_json = nlohmann::ordered_json;

enum class Method { Classical, PairDb, SplitSearch };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Classical: return "classical";
    case Method::PairDb: return "pairdb";
    case Method::SplitSearch: return "splitsearch";
  }
  return "?";
}

inline std::optional<Method> method_from_name(const std::string& name) {
  if (name == "classical") return Method::Classical;
  if (name == "pairdb") return Method::PairDb;
  if (name == "splitsearch") return Method::SplitSearch;
  return std::nullopt;
}

struct ProveOptions {
  std::string sequent;
  Method method = Method::PairDb;
  std::uint64_t seed = 0;
  std::uint64_t shots = 1000;
  int budget = 200;
  bool timing = false;  // wall_ms is left out by default so reports are
                        // byte-identical for identical flags and seed
};

struct ProveOutcome {
  int exit_code = 0;  // 0 proved, 1 parse/usage, 2 not provable, 3 recovery failed
  ordered_json report;
  std::string message;
};

namespace detail {

inline ordered_json report_skeleton(const ProveOptions& opt, std::size_t k) {
  ordered_json j;
  j["schema"] = 1;
  j["sequent"] = opt.sequent;
  j["method"] = method_name(opt.method);
  j["k"] = k;
  return j;
}

inline void attach_proof(ordered_json& j, const ProofTree& tree) {
  ordered_json p;
  p["text"] = render_proof(tree, ProofFormat::Text);
  p["latex"] = render_proof(tree, ProofFormat::Latex);
  j["proof"] = std::move(p);
  j["valid"] = true;
}

}  // namespace detail

// Parses, proves with the selected pipeline, and assembles the run report.
// Never throws for input-level failures; the exit code and message say what
// happened and the report carries whatever the run produced.
inline ProveOutcome run_prove(const ProveOptions& opt) {
  ProveOutcome out;
  Sequent s;
  try {
    s = parse_sequent(opt.sequent);
  } catch (const ParseError& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  }

  const bool lolli = side_contains_lolli(s.left) || side_contains_lolli(s.right);
  // clause count: per side in the tensor fragment, every occurrence once
  // implications can move atoms across sides
  const std::size_t k = lolli
                            ? flatten_side(s.left).size() + flatten_side(s.right).size()
                            : flatten_side(s.left).size();
  const auto t0 = std::chrono::steady_clock::now();

  ordered_json j = detail::report_skeleton(opt, k);
  try {
    switch (opt.method) {
      case Method::Classical: {
        j["iterations"] = 0;
        j["oracle_calls"] = 0;
        j["shots"] = opt.shots;
        j["seed"] = opt.seed;
        j["histogram"] = ordered_json::object();
        auto proof = prove_bruteforce(
            s, lolli ? Fragment::TensorLolli : Fragment::TensorOnly);
        if (!proof) {
          j["valid"] = false;
          out.exit_code = 2;
          out.message = "not provable";
        } else {
          detail::attach_proof(j, *proof);
        }
        break;
      }
      case Method::PairDb: {
        SeededRng rng(opt.seed);
        PairDbProof res = prove_pairdb(s, rng, opt.shots);
        j["qubits_per_copy"] = 2 * register_width(std::max<std::size_t>(k, 2));
        j["iterations"] = res.stats.iterations.empty() ? 0 : res.stats.iterations[0];
        j["oracle_calls"] = res.stats.oracle_calls;
        j["shots"] = opt.shots;
        j["seed"] = opt.seed;
        ordered_json hist = ordered_json::object();
        for (std::size_t b = 0; b < res.stats.histograms.size(); ++b) {
          ordered_json h = ordered_json::object();
          for (const auto& [bits, count] : res.stats.histograms[b]) h[bits] = count;
          hist[index_to_bits(b, register_width(std::max<std::size_t>(k, 2)))] =
              std::move(h);
        }
        j["histogram"] = std::move(hist);
        j["permutation"] = res.permutation;
        detail::attach_proof(j, res.tree);
        break;
      }
      case Method::SplitSearch: {
        SeededRng rng(opt.seed);
        SplitSearchProof res = prove_splitsearch(s, rng, opt.budget);
        j["code_width"] = res.stats.width;
        j["iterations"] = res.stats.iterations_per_run;
        j["oracle_calls"] =
            static_cast<std::size_t>(res.stats.runs) *
            static_cast<std::size_t>(res.stats.iterations_per_run);
        j["shots"] = opt.shots;
        j["seed"] = opt.seed;
        ordered_json hist = ordered_json::object();
        for (const auto& [bits, count] : res.stats.outcome_hist) hist[bits] = count;
        j["histogram"] = std::move(hist);
        j["runs"] = res.stats.runs;
        ordered_json codes = ordered_json::array();
        for (const auto& c : res.codes) codes.push_back(c);
        j["split_codes"] = std::move(codes);
        detail::attach_proof(j, res.tree);
        break;
      }
    }
  } catch (const AtomMismatchError& e) {
    j["valid"] = false;
    out.exit_code = 2;
    out.message = e.what();
  } catch (const NotProvableError& e) {
    j["valid"] = false;
    out.exit_code = 2;
    out.message = e.what();
  } catch (const RecoveryError& e) {
    j["valid"] = false;
    out.exit_code = 3;
    out.message = e.what();
  } catch (const DecodeError& e) {
    j["valid"] = false;
    out.exit_code = 3;
    out.message = e.what();
  } catch (const std::invalid_argument& e) {
    out.exit_code = 1;
    out.message = e.what();
    out.report = std::move(j);
    return out;
  }

  if (opt.timing) {
    const auto t1 = std::chrono::steady_clock::now();
    j["wall_ms"] =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  out.report = std::move(j);
  return out;
}

// --- benchmark ------------------------------------------------------------

struct BenchRow {
  std::size_t k = 0;
  int trial = 0;
  bool success = false;
  int iterations = 0;
  std::size_t oracle_calls = 0;
  double p_theory = 0.0;
  double p_empirical = 0.0;
  double p_premeasure = 0.0;  // exact marginal, not part of the CSV
  double wall_ms = 0.0;
};

namespace detail {

// Digit-free atom names (digits would parse as occurrence labels):
// A..Z, Aa..Za, Ab..Zb, ...
inline std::string bench_atom_name(std::size_t i) {
  std::string name(1, static_cast<char>('A' + i % 26));
  if (i >= 26) name += static_cast<char>('a' + (i / 26 - 1));
  return name;
}

inline FormulaPtr right_nested(const std::vector<std::string>& names) {
  FormulaPtr f = Formula::atom(Atom{names.back(), 0});
  for (std::size_t i = names.size() - 1; i-- > 0;)
    f = Formula::tensor(Formula::atom(Atom{names[i], 0}), f);
  return f;
}

}  // namespace detail

// Random-permutation sequent for k clauses: the left side lists k distinct
// atoms in order, the right side the same atoms shuffled by `perm` (right
// position b holds the atom from left position perm[b]).
inline Sequent bench_sequent(std::size_t k, const std::vector<std::size_t>& perm) {
  std::vector<std::string> left_names, right_names;
  for (std::size_t i = 0; i < k; ++i)
    left_names.push_back(detail::bench_atom_name(i));
  for (std::size_t b = 0; b < k; ++b)
    right_names.push_back(left_names[perm[b]]);
  return Sequent{{detail::right_nested(left_names)},
                 {detail::right_nested(right_names)}};
}

inline std::vector<std::size_t> random_permutation(std::size_t k, SeededRng& rng) {
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i;
  for (std::size_t i = k; i > 1; --i)
    std::swap(perm[i - 1], perm[rng.below(i)]);
  return perm;
}

inline double pairdb_success_theory(std::size_t k) {
  const std::size_t n = std::max<std::size_t>(k, 2);
  const int m = grover_iterations(n, 1);
  const double theta = std::asin(1.0 / std::sqrt(static_cast<double>(n)));
  const double v = std::sin((2.0 * m + 1.0) * theta);
  return v * v;
}

// Pair-database recovery trials on random permutations. Rows come out in
// (k, trial) order whatever the execution schedule.
inline std::vector<BenchRow> bench_pairdb(const std::vector<std::size_t>& ks,
                                          int trials, std::uint64_t seed,
                                          std::uint64_t shots) {
  std::vector<BenchRow> rows;
  for (std::size_t k : ks) {
    if (k < 2 || k > 64)
      throw std::invalid_argument("bench: k must be within 2..64");
    for (int trial = 0; trial < trials; ++trial) {
      SeededRng trial_rng =
          SeededRng(seed).substream(k).substream(static_cast<std::uint64_t>(trial));
      const auto perm = random_permutation(k, trial_rng);
      const Sequent s = bench_sequent(k, perm);

      BenchRow row;
      row.k = k;
      row.trial = trial;
      row.p_theory = pairdb_success_theory(k);

      const auto t0 = std::chrono::steady_clock::now();
      try {
        RecoveredPermutation rec = recover_permutation(s, trial_rng, shots);
        row.success = rec.perm == perm;
        row.iterations = rec.stats.iterations.empty() ? 0 : rec.stats.iterations[0];
        row.oracle_calls = rec.stats.oracle_calls;
        double emp = 0.0, pre = 0.0;
        const int n = register_width(k);
        for (std::size_t b = 0; b < k; ++b) {
          const std::string target = index_to_bits(perm[b], n);
          const auto& hist = rec.stats.histograms[b];
          const auto it = hist.find(target);
          std::uint64_t total = 0;
          for (const auto& [bits, count] : hist) total += count;
          emp += it == hist.end()
                     ? 0.0
                     : static_cast<double>(it->second) / static_cast<double>(total);
          pre += rec.stats.premeasure_target_prob[b];
        }
        row.p_empirical = emp / static_cast<double>(k);
        row.p_premeasure = pre / static_cast<double>(k);
      } catch (const RecoveryError&) {
        row.success = false;
      }
      const auto t1 = std::chrono::steady_clock::now();
      row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "k,trial,method,success,iterations,oracle_calls,p_theory,p_empirical,wall_ms\n";
  char buf[160];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%d,pairdb,%d,%d,%zu,%.6f,%.6f,%.3f\n",
                  r.k, r.trial, r.success ? 1 : 0, r.iterations, r.oracle_calls,
                  r.p_theory, r.p_empirical, r.wall_ms);
    out += buf;
  }
  return out;
}

inline ordered_json bench_json(const std::vector<BenchRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const BenchRow& r : rows) {
    ordered_json j;
    j["k"] = r.k;
    j["trial"] = r.trial;
    j["method"] = "pairdb";
    j["success"] = r.success;
    j["iterations"] = r.iterations;
    j["oracle_calls"] = r.oracle_calls;
    j["p_theory"] = r.p_theory;
    j["p_empirical"] = r.p_empirical;
    j["wall_ms"] = r.wall_ms;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace qproof
