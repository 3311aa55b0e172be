// Batch front-end: constraint-spec ingestion, seeded verification and
// sharpness runs, and report emission.
//
// Exit codes: 0 success, 1 usage, 2 parse/validation failure,
// 3 numerical failure, 4 invariant violation (selftest).

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entrostab/entrostab.hpp"

namespace {

using entrostab::Json;

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(flag + ": cannot parse '" + item +
                                  "' as a number");
    }
  }
  if (out.empty())
    throw std::invalid_argument(flag + ": expected a comma-separated list");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw entrostab::ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw entrostab::NumericalError(path + ": cannot open for write");
  out << text;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Flat key,value rendering of a report for --format csv.
void flatten_json(const Json& j, const std::string& prefix,
                  std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items())
      flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i)
      flatten_json(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_number_float()) {
    out << prefix << "," << format_double(j.get<double>()) << "\n";
  } else {
    out << prefix << "," << j.dump() << "\n";
  }
}

struct ReportWriter {
  std::string command;
  std::string spec_digest;
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void write(const std::string& out_path, const std::string& format,
             Json payload) const {
    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    Json report;
    Json meta;
    meta["tool"] = "entrostab";
    meta["version"] = entrostab::version_string;
    meta["command"] = command;
    meta["spec_digest"] = spec_digest;
    meta["seed"] = seed;
    meta["samples"] = samples;
    meta["wall_ms"] = wall_ms;
    report["meta"] = std::move(meta);
    report["payload"] = std::move(payload);
    if (format == "csv") {
      std::ostringstream os;
      os << "key,value\n";
      flatten_json(report["payload"], "", os);
      write_file(out_path, os.str());
    } else {
      write_file(out_path, report.dump(2) + "\n");
    }
  }
};

int run(int argc, char** argv) {
  CLI::App app{"entrostab: constrained entropy minimization and stability "
               "verification for block-diagonal quantum states"};
  app.require_subcommand(1);

  std::string spec_path, out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::int64_t samples = 10000;
  double tol_cluster = 1e-8;
  std::string q_text, v_text, eps_text;

  auto add_common = [&](CLI::App* cmd, bool needs_spec) {
    if (needs_spec)
      cmd->add_option("--spec", spec_path, "input file (JSON)")->required();
    cmd->add_option("--out", out_path, "report output path")->required();
    cmd->add_option("--seed", seed, "64-bit seed (default 0)");
    cmd->add_option("--format", format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* cmd_minimize =
      app.add_subcommand("minimize", "exact entropy minimum of a spec");
  add_common(cmd_minimize, true);

  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "Monte-Carlo verification of the stability inequality");
  add_common(cmd_verify, true);
  cmd_verify->add_option("--samples", samples, "sample count (default 10000)");

  CLI::App* cmd_sharpness = app.add_subcommand(
      "sharpness", "entropy-gap scaling along a marginal direction; also "
                   "writes <out>.csv with distance,gap columns");
  add_common(cmd_sharpness, true);
  cmd_sharpness->add_option("--q", q_text, "base marginal, comma-separated")
      ->required();
  cmd_sharpness
      ->add_option("--v", v_text, "direction (sums to zero), comma-separated")
      ->required();
  cmd_sharpness
      ->add_option("--eps", eps_text,
                   "strictly decreasing epsilon ladder, comma-separated; "
                   "use >= 4 points spanning >= 2 decades for a stable fit")
      ->required();

  CLI::App* cmd_gibbs = app.add_subcommand(
      "gibbs", "spectral blocks of an observable plus stability "
               "verification at fixed sector populations");
  add_common(cmd_gibbs, true);
  cmd_gibbs->add_option("--samples", samples, "sample count (default 10000)");
  cmd_gibbs->add_option("--tol-cluster", tol_cluster,
                        "eigenvalue clustering gap (default 1e-8)");
  cmd_gibbs->add_option("--q", q_text,
                        "sector populations (default: uniform over the "
                        "detected blocks)");

  CLI::App* cmd_selftest = app.add_subcommand(
      "selftest", "run the full invariant suite; nonzero exit on failure");
  cmd_selftest->add_option("--seed", seed, "64-bit seed (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1; --help exits 0
  }

  if (cmd_selftest->parsed()) {
    const auto results = entrostab::run_selftest(seed);
    int failures = 0;
    for (const auto& r : results) {
      std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  ("
                << r.detail << ")\n";
      if (!r.pass) ++failures;
    }
    std::cout << results.size() - failures << "/" << results.size()
              << " checks passed\n";
    return failures == 0 ? 0 : 4;
  }

  ReportWriter writer;
  writer.seed = seed;
  writer.samples = samples;
  const std::string spec_bytes = read_file(spec_path);
  writer.spec_digest = entrostab::fnv1a_digest(spec_bytes);

  Json spec_json;
  try {
    spec_json = Json::parse(spec_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw entrostab::ParseError(spec_path + ": malformed JSON: " + e.what());
  }

  if (cmd_minimize->parsed()) {
    writer.command = "minimize";
    writer.samples = 0;
    const entrostab::BlockConvexSet c = entrostab::spec_from_json(spec_json);
    const entrostab::MinimizerDescription md = entrostab::minimize_entropy(c);
    writer.write(out_path, format, entrostab::to_json(md));
    std::cout << "s_min=" << format_double(md.s_min)
              << " minimizing_marginals=" << md.minimizing_marginals.size()
              << "\n";
    return 0;
  }

  if (cmd_verify->parsed()) {
    writer.command = "verify";
    const entrostab::BlockConvexSet c = entrostab::spec_from_json(spec_json);
    const entrostab::StabilityReport report =
        entrostab::verify_stability(c, samples, seed);
    writer.write(out_path, format, entrostab::to_json(report));
    std::cout << "s_min=" << format_double(report.s_min)
              << " C=" << format_double(report.assembled_c)
              << " violations=" << report.violations << " best_C="
              << (report.empirical_best_c
                      ? format_double(*report.empirical_best_c)
                      : "n/a")
              << "\n";
    return 0;
  }

  if (cmd_sharpness->parsed()) {
    writer.command = "sharpness";
    writer.samples = 0;
    const entrostab::BlockConvexSet c = entrostab::spec_from_json(spec_json);
    const entrostab::ProbabilityVector q(parse_double_list(q_text, "--q"));
    const std::vector<double> v_list = parse_double_list(v_text, "--v");
    entrostab::RealVector v(v_list.size());
    for (size_t i = 0; i < v_list.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = v_list[i];
    std::vector<double> ladder = parse_double_list(eps_text, "--eps");

    const entrostab::SharpnessReport classical =
        entrostab::sharpness_family(c.marginal(), q, v, ladder);
    Json payload;
    payload["classical"] = entrostab::to_json(classical);
    bool all_full = true;
    for (const auto& set : c.conditionals())
      if (set.kind() != entrostab::ConditionalSet::Kind::Full)
        all_full = false;
    if (all_full) {
      const entrostab::MinimizerDescription md =
          entrostab::minimize_entropy(c);
      payload["quantum"] =
          entrostab::to_json(entrostab::quantum_sharpness_family(
              c, md, q, v, ladder));
    } else {
      payload["quantum"] = nullptr;
    }

    std::ostringstream csv;
    csv << "distance,gap\n";
    for (size_t k = 0; k < classical.distances.size(); ++k)
      csv << format_double(classical.distances[k]) << ","
          << format_double(classical.gaps[k]) << "\n";
    write_file(out_path + ".csv", csv.str());

    writer.write(out_path, format, std::move(payload));
    std::cout << "exponent="
              << format_double(classical.fitted_exponent) << " derivative="
              << (classical.derivative_divergent
                      ? "divergent"
                      : format_double(classical.directional_derivative))
              << "\n";
    return 0;
  }

  if (cmd_gibbs->parsed()) {
    writer.command = "gibbs";
    const entrostab::HermitianMatrix h0 =
        entrostab::observable_from_json(spec_json);
    const entrostab::SpectralBlocks blocks =
        entrostab::gibbs_from_observable(h0, tol_cluster);
    const int r = blocks.decomposition.block_count();
    const entrostab::ProbabilityVector q =
        q_text.empty()
            ? entrostab::ProbabilityVector::uniform(r)
            : entrostab::ProbabilityVector(parse_double_list(q_text, "--q"));
    const entrostab::StabilityReport report =
        entrostab::gibbs_verify(blocks.decomposition, q, samples, seed);
    Json payload;
    payload["spectral_blocks"] = entrostab::to_json(blocks);
    payload["stability"] = entrostab::to_json(report);
    writer.write(out_path, format, std::move(payload));
    std::cout << "blocks=" << r << " s_min=" << format_double(report.s_min)
              << " C=" << format_double(report.assembled_c)
              << " violations=" << report.violations << "\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const entrostab::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const entrostab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const entrostab::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const entrostab::InfeasibleDirection& e) {
    std::cerr << "infeasible direction: " << e.what() << "\n";
    return 2;
  } catch (const entrostab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
