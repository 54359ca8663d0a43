// qfdiag: separator catalogs, diagnostic tables and simulated diagnosis campaigns.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qfd/catalog.hpp"
#include "qfd/diagnosis.hpp"
#include "qfd/io.hpp"

namespace {

enum Exit : int { kOk = 0, kParse = 1, kUsage = 2, kUndetectable = 3, kConsistency = 4, kAmbiguous = 5 };

struct UsageError : qfd::Error {
  using qfd::Error::Error;
};

struct Globals {
  std::string convention = "half";
  std::uint64_t seed = 0;
  std::string format;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

qfd::Circuit load_circuit(const std::string& path) { return qfd::parse_circuit(read_file(path)); }

qfd::FaultSpec load_fault_spec(const std::string& arg) {
  if (arg.empty() || arg == "smgf") return {};
  try {
    return qfd::fault_spec_from_json(nlohmann::json::parse(read_file(arg)));
  } catch (const nlohmann::json::exception& e) {
    throw qfd::ParseError(0, arg + ": " + e.what());
  }
}

// Explicit --format wins, then the output file extension, then the command default.
std::string pick_format(const Globals& g, const std::string& out_path, const std::string& fallback) {
  if (!g.format.empty()) return g.format;
  if (out_path.ends_with(".json")) return "json";
  if (out_path.ends_with(".csv")) return "csv";
  return fallback;
}

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

int cmd_catalog(const Globals& g) {
  const auto conv = qfd::parse_convention(g.convention);
  const auto entries = qfd::missing_gate_catalog(conv);
  const std::string fmt = pick_format(g, "", "text");
  if (fmt == "json") {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& e : entries) {
      auto j = qfd::separator_to_json(e.separator);
      j["gate"] = e.label;
      gates.push_back(j);
    }
    std::cout << nlohmann::json{{"metadata", qfd::metadata_json(conv)}, {"gates", gates}}.dump(2) << '\n';
  } else if (fmt == "csv") {
    std::cout << "gate,k,delta\n";
    for (const auto& e : entries) std::cout << e.label << ',' << e.separator.k << ',' << e.delta << '\n';
  } else {
    std::cout << "gate\tseparator\tk\tdelta\n";
    for (const auto& e : entries)
      std::cout << e.label << '\t' << qfd::vector_text(e.separator.phi_prime) << '\t' << fixed4(e.separator.k) << '\t'
                << qfd::fixed2(e.delta) << '\n';
  }
  return kOk;
}

struct SeparatorArgs {
  std::string circuit;
  std::size_t gate = 0;
  std::string fault = "smgf";
};

int cmd_separator(const Globals& g, const SeparatorArgs& a) {
  const auto conv = qfd::parse_convention(g.convention);
  const qfd::Circuit c = load_circuit(a.circuit);
  const qfd::FaultSpec spec = load_fault_spec(a.fault);
  spec.validate(c);
  if (a.gate < 1 || a.gate > c.size())
    throw UsageError("gate index " + std::to_string(a.gate) + " outside 1.." + std::to_string(c.size()));
  const qfd::SeparatorSolution sep = qfd::circuit_separator(c, spec, a.gate, conv);
  const double delta = qfd::error_probability(sep.k);
  if (sep.k >= qfd::kUndetectableK)
    throw qfd::UndetectableFault(a.gate, "gate " + std::to_string(a.gate) + ": fault is undetectable (k = 1)");

  if (pick_format(g, "", "text") == "json") {
    auto j = qfd::separator_to_json(sep);
    auto meta = qfd::metadata_json(conv);
    meta["circuit_hash"] = qfd::circuit_hash(c);
    meta["fault_hash"] = qfd::fault_hash(spec);
    j["metadata"] = meta;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "gate " << a.gate << '\n'
              << "k " << fixed4(sep.k) << '\n'
              << "kappa " << fixed4(sep.kappa) << '\n'
              << "delta " << fixed4(delta) << '\n'
              << "phi' " << qfd::vector_text(sep.phi_prime) << '\n'
              << "phi " << qfd::vector_text(sep.phi) << '\n';
  }
  return kOk;
}

struct TableArgs {
  std::string circuit;
  std::string fault = "smgf";
  std::string output;
  bool allow_undetectable = false;
};

int cmd_table(const Globals& g, const TableArgs& a) {
  const auto conv = qfd::parse_convention(g.convention);
  const qfd::Circuit c = load_circuit(a.circuit);
  const qfd::FaultSpec spec = load_fault_spec(a.fault);
  const qfd::DiagnosticTable t = qfd::build_table(c, spec, conv);
  if (!t.all_detectable() && !a.allow_undetectable) {
    for (const auto& row : t.rows)
      if (!row.detectable) std::cerr << "gate " << row.test << ": undetectable fault (" << row.note << ")\n";
    std::cerr << "rerun with --allow-undetectable to emit the table anyway\n";
    return kUndetectable;
  }
  const std::string fmt = pick_format(g, a.output, a.output.empty() ? "text" : "json");
  if (fmt == "json")
    write_output(a.output, qfd::table_to_json(t).dump(2) + "\n");
  else if (fmt == "csv")
    write_output(a.output, qfd::table_to_csv(t));
  else
    write_output(a.output, qfd::table_to_text(t));
  return kOk;
}

struct DiagnoseArgs {
  std::string circuit;
  std::string fault = "smgf";
  std::string table;
  std::string output;
  std::size_t inject = 0;
  std::size_t budget = 20;
  std::size_t shots = 5;
  std::vector<std::size_t> order;
};

void check_consistency(const qfd::DiagnosticTable& stored, const qfd::DiagnosticTable& fresh) {
  if (stored.circuit_hash != fresh.circuit_hash)
    throw qfd::ConsistencyError("table was built for circuit " + stored.circuit_hash + ", not " + fresh.circuit_hash);
  if (stored.fault_hash != fresh.fault_hash)
    throw qfd::ConsistencyError("table was built for fault spec " + stored.fault_hash + ", not " + fresh.fault_hash);
  if (stored.convention != fresh.convention)
    throw qfd::ConsistencyError("table uses the " + qfd::to_string(stored.convention) + "-angle convention");
}

void print_result(const Globals& g, const qfd::DiagnosisResult& r, const std::string& output, bool ambiguous) {
  const std::string fmt = pick_format(g, output, "text");
  if (fmt == "json") {
    auto j = qfd::result_to_json(r);
    j["metadata"] = qfd::metadata_json(qfd::parse_convention(g.convention));
    j["metadata"]["seed"] = g.seed;
    j["ambiguous"] = ambiguous;
    write_output(output, j.dump(2) + "\n");
    return;
  }
  std::ostringstream out;
  auto join = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  if (ambiguous)
    out << "ambiguous " << join(r.survivors) << '\n';
  else
    out << "verdict " << r.verdict << '\n';
  out << "evaluations " << r.evaluations_used << '\n' << "tests " << join(r.test_sequence) << '\n';
  write_output(output, out.str());
}

int cmd_diagnose(const Globals& g, const DiagnoseArgs& a) {
  const auto conv = qfd::parse_convention(g.convention);
  const qfd::Circuit c = load_circuit(a.circuit);
  const qfd::FaultSpec spec = load_fault_spec(a.fault);
  if (a.inject > c.size())
    throw UsageError("--inject-fault " + std::to_string(a.inject) + " outside 0.." + std::to_string(c.size()));

  const auto tests = qfd::build_tests(c, spec, conv);
  qfd::DiagnosticTable table = qfd::build_table(c, spec, tests, conv);
  if (!a.table.empty()) {
    qfd::DiagnosticTable stored;
    try {
      stored = qfd::table_from_json(nlohmann::json::parse(read_file(a.table)));
    } catch (const nlohmann::json::exception& e) {
      throw qfd::ParseError(0, a.table + ": " + e.what());
    }
    check_consistency(stored, table);
    table = std::move(stored);
  }

  qfd::CampaignConfig cfg;
  cfg.shots_per_test = a.shots;
  cfg.budget = a.budget;
  cfg.rng_seed = g.seed;
  cfg.test_order = a.order;
  const qfd::Circuit under_test = qfd::faulty_variant(c, spec, a.inject);
  try {
    print_result(g, qfd::run_campaign(under_test, table, tests, cfg), a.output, false);
  } catch (const qfd::AmbiguousDiagnosis& e) {
    print_result(g, e.result, a.output, true);
    return kAmbiguous;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-fault test generation and diagnosis for quantum circuits", "qfdiag"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", qfd::kToolVersion);

  Globals g;
  app.add_option("--convention", g.convention, "Rotation angle convention")
      ->check(CLI::IsMember({"half", "full"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Campaign seed")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));

  auto* catalog = app.add_subcommand("catalog", "Missing-gate separators for the built-in gates");

  SeparatorArgs sep_args;
  auto* separator = app.add_subcommand("separator", "Separator input state for one gate of a circuit");
  separator->add_option("-c,--circuit", sep_args.circuit, "Circuit file")->required();
  separator->add_option("-i,--gate", sep_args.gate, "1-based gate index")->required();
  separator->add_option("--fault", sep_args.fault, "'smgf' or a fault spec JSON file")->capture_default_str();

  TableArgs table_args;
  auto* table = app.add_subcommand("table", "Diagnostic fault table");
  table->add_option("-c,--circuit", table_args.circuit, "Circuit file")->required();
  table->add_option("--fault", table_args.fault, "'smgf' or a fault spec JSON file")->capture_default_str();
  table->add_option("-o,--output", table_args.output, "Output file (stdout when omitted)");
  table->add_flag("--allow-undetectable", table_args.allow_undetectable, "Emit rows for undetectable faults");

  DiagnoseArgs diag_args;
  auto* diagnose = app.add_subcommand("diagnose", "Simulated diagnosis campaign on a circuit with an injected fault");
  diagnose->add_option("-c,--circuit", diag_args.circuit, "Golden circuit file")->required();
  diagnose->add_option("--inject-fault", diag_args.inject, "Faulty gate of the circuit under test, 0 for none")
      ->capture_default_str();
  diagnose->add_option("--fault", diag_args.fault, "'smgf' or a fault spec JSON file")->capture_default_str();
  diagnose->add_option("--table", diag_args.table, "Precomputed table JSON, checked against the circuit");
  diagnose->add_option("--budget", diag_args.budget, "Total circuit evaluations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  diagnose->add_option("--shots", diag_args.shots, "Evaluations per test application")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  diagnose->add_option("--tests", diag_args.order, "Explicit test order (adaptive when omitted)")->delimiter(',');
  diagnose->add_option("-o,--output", diag_args.output, "Result file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*catalog) return cmd_catalog(g);
    if (*separator) return cmd_separator(g, sep_args);
    if (*table) return cmd_table(g, table_args);
    if (*diagnose) return cmd_diagnose(g, diag_args);
  } catch (const qfd::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const qfd::UndetectableFault& e) {
    std::cerr << e.what() << '\n';
    return kUndetectable;
  } catch (const qfd::ConsistencyError& e) {
    std::cerr << "consistency error: " << e.what() << '\n';
    return kConsistency;
  } catch (const UsageError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const qfd::IndexError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const qfd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  }
  return kUsage;
}
