#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qproof/report.hpp"
#include "qproof/selftest.hpp"

namespace {

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return 1;
  }
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-simulated proof search for multiplicative linear logic"};
  app.require_subcommand(1);

  // prove
  std::string sequent_arg, file_arg, method_arg = "pairdb", format_arg = "json";
  std::string out_path;
  std::uint64_t seed = 0, shots = 1000;
  int budget = 200;
  bool timing = false;
  CLI::App* prove = app.add_subcommand("prove", "prove one sequent");
  prove->add_option("--sequent", sequent_arg, "sequent text, e.g. \"A, B |- A*B\"");
  prove->add_option("--file", file_arg, "read the sequent from a file");
  prove->add_option("--method", method_arg, "classical | pairdb | splitsearch")
      ->check(CLI::IsMember({"classical", "pairdb", "splitsearch"}));
  prove->add_option("--seed", seed, "rng seed (default 0)");
  prove->add_option("--shots", shots, "per-query shots for majority decoding");
  prove->add_option("--budget", budget, "split-search run budget");
  prove->add_option("--format", format_arg, "json | text | latex")
      ->check(CLI::IsMember({"json", "text", "latex"}));
  prove->add_option("--out", out_path, "write the report here instead of stdout");
  prove->add_flag("--timing", timing, "include wall_ms in the report");

  // bench
  std::string klist_arg = "2,4,8,16", bench_format = "csv", bench_out;
  int trials = 5;
  std::uint64_t bench_seed = 0, bench_shots = 1000;
  CLI::App* bench = app.add_subcommand("bench", "pair-database recovery benchmark");
  bench->add_option("--k-list", klist_arg, "comma-separated clause counts (2..64)");
  bench->add_option("--trials", trials, "trials per k");
  bench->add_option("--seed", bench_seed, "rng seed");
  bench->add_option("--shots", bench_shots, "per-query shots");
  bench->add_option("--format", bench_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--out", bench_out, "output path");

  CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suites");

  CLI11_PARSE(app, argc, argv);

  if (prove->parsed()) {
    qproof::ProveOptions opt;
    if (!file_arg.empty()) {
      std::ifstream in(file_arg);
      if (!in) {
        std::cerr << "error: cannot read " << file_arg << "\n";
        return 1;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      opt.sequent = ss.str();
      while (!opt.sequent.empty() &&
             (opt.sequent.back() == '\n' || opt.sequent.back() == '\r'))
        opt.sequent.pop_back();
    } else if (!sequent_arg.empty()) {
      opt.sequent = sequent_arg;
    } else {
      std::cerr << "error: provide --sequent or --file\n";
      return 1;
    }
    opt.method = *qproof::method_from_name(method_arg);
    opt.seed = seed;
    opt.shots = shots;
    opt.budget = budget;
    opt.timing = timing;

    qproof::ProveOutcome res = qproof::run_prove(opt);
    if (!res.message.empty()) std::cerr << res.message << "\n";

    std::string body;
    if (format_arg == "json") {
      body = res.report.is_null() ? "{}\n" : res.report.dump(2) + "\n";
    } else if (format_arg == "latex") {
      if (res.report.contains("proof"))
        body = res.report["proof"]["latex"].get<std::string>();
    } else if (!res.report.is_null()) {
      body = "sequent:  " + res.report.value("sequent", std::string{}) + "\n" +
             "method:   " + res.report.value("method", std::string{}) + "\n" +
             "valid:    " + (res.report.value("valid", false) ? "yes" : "no") + "\n";
      if (res.report.contains("permutation"))
        body += "pairing:  " + res.report["permutation"].dump() + "\n";
      if (res.report.contains("split_codes"))
        body += "codes:    " + res.report["split_codes"].dump() + "\n";
      if (res.report.contains("oracle_calls"))
        body += "oracle calls: " + res.report["oracle_calls"].dump() + "\n";
      if (res.report.contains("proof"))
        body += "\n" + res.report["proof"]["text"].get<std::string>();
    }
    const int werr = write_output(body, out_path);
    return res.exit_code ? res.exit_code : werr;
  }

  if (bench->parsed()) {
    std::vector<std::size_t> ks;
    std::stringstream ss(klist_arg);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) ks.push_back(std::stoul(item));
    try {
      const auto rows = qproof::bench_pairdb(ks, trials, bench_seed, bench_shots);
      const std::string body = bench_format == "csv"
                                   ? qproof::bench_csv(rows)
                                   : qproof::bench_json(rows).dump(2) + "\n";
      return write_output(body, bench_out);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  if (selftest->parsed()) {
    const int failures = qproof::selftest::run_all(std::cout);
    if (failures) std::cout << failures << " check(s) failed\n";
    return failures ? 1 : 0;
  }
  return 0;
}
