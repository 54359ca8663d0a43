#pragma once

// JSON, CSV and text renderings of tables, separators and diagnosis results.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qfd/diagnosis.hpp"
#include "qfd/helstrom.hpp"
#include "qfd/separator.hpp"

namespace qfd {

inline constexpr const char* kToolName = "qfdiag";
inline constexpr const char* kToolVersion = "0.1.0";

inline double round2(double x) {
  const double r = std::round(x * 100) / 100;
  return r == 0 ? 0.0 : r;
}

inline std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round2(x));
  return buf;
}

inline nlohmann::json vector_to_json(const CVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

inline nlohmann::json triplet_to_json(const OutcomeTriplet& t) { return {t.p0, t.p1, t.p_unknown}; }

inline OutcomeTriplet triplet_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("outcome triplet must be [p0, p1, punknown]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline nlohmann::json metadata_json(RotationConvention conv) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"convention", to_string(conv)}};
}

// ---- diagnostic table ----

inline nlohmann::json table_to_json(const DiagnosticTable& t) {
  nlohmann::json meta = metadata_json(t.convention);
  meta["circuit_hash"] = t.circuit_hash;
  meta["fault_hash"] = t.fault_hash;
  meta["qubits"] = t.n;
  meta["gates"] = t.s;

  nlohmann::json rows = nlohmann::json::array(), cells = nlohmann::json::array(), rounded = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r{{"test", row.test}, {"detectable", row.detectable}, {"delta", row.delta}, {"k", row.k}};
    if (!row.note.empty()) r["note"] = row.note;
    rows.push_back(r);
    if (!row.detectable) {
      cells.push_back(nullptr);
      rounded.push_back(nullptr);
      continue;
    }
    nlohmann::json full = nlohmann::json::array(), two = nlohmann::json::array();
    for (const auto& c : row.cells) {
      full.push_back(triplet_to_json(c));
      two.push_back({round2(c.p0), round2(c.p1), round2(c.p_unknown)});
    }
    cells.push_back(full);
    rounded.push_back(two);
  }
  return {{"metadata", meta}, {"rows", rows}, {"cells", cells}, {"rounded", rounded}};
}

inline DiagnosticTable table_from_json(const nlohmann::json& j) {
  try {
    DiagnosticTable t;
    const auto& meta = j.at("metadata");
    t.convention = parse_convention(meta.at("convention").get<std::string>());
    t.circuit_hash = meta.at("circuit_hash").get<std::string>();
    t.fault_hash = meta.at("fault_hash").get<std::string>();
    t.n = meta.at("qubits").get<std::size_t>();
    t.s = meta.at("gates").get<std::size_t>();
    const auto& rows = j.at("rows");
    const auto& cells = j.at("cells");
    if (rows.size() != t.s || cells.size() != t.s) throw Error("table has " + std::to_string(rows.size()) + " rows");
    for (std::size_t q = 0; q < t.s; ++q) {
      TableRow row;
      row.test = rows[q].at("test").get<std::size_t>();
      row.detectable = rows[q].at("detectable").get<bool>();
      row.delta = rows[q].at("delta").get<double>();
      row.k = rows[q].at("k").get<double>();
      row.note = rows[q].value("note", "");
      if (row.detectable) {
        if (cells[q].size() != t.s + 1) throw Error("row " + std::to_string(q + 1) + " has the wrong number of cells");
        for (const auto& c : cells[q]) row.cells.push_back(triplet_from_json(c));
      }
      t.rows.push_back(std::move(row));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed table: ") + e.what());
  }
}

inline std::string table_to_csv(const DiagnosticTable& t) {
  std::ostringstream out;
  out << "test,variant,p0,p1,punknown\n";
  out.precision(17);
  for (const auto& row : t.rows)
    for (std::size_t r = 0; r < row.cells.size(); ++r)
      out << row.test << ',' << r << ',' << row.cells[r].p0 << ',' << row.cells[r].p1 << ','
          << row.cells[r].p_unknown << '\n';
  return out.str();
}

inline std::string table_to_text(const DiagnosticTable& t) {
  std::ostringstream out;
  out << "test";
  for (std::size_t r = 0; r <= t.s; ++r) out << "\tC" << r;
  out << '\n';
  for (const auto& row : t.rows) {
    out << 'F' << row.test;
    if (!row.detectable) {
      out << "\tundetectable\n";
      continue;
    }
    for (const auto& c : row.cells) out << "\t(" << fixed2(c.p0) << ',' << fixed2(c.p1) << ',' << fixed2(c.p_unknown) << ')';
    out << '\n';
  }
  return out.str();
}

// ---- separators ----

inline nlohmann::json separator_to_json(const SeparatorSolution& s) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : s.classes)
    classes.push_back({{"phase", c.phase}, {"weight", c.weight}, {"multiplicity", c.eigenvectors.size()}});
  nlohmann::json out{{"k", s.k},
                     {"kappa", s.kappa},
                     {"delta", error_probability(s.k)},
                     {"classes", classes},
                     {"phi_prime", vector_to_json(s.phi_prime)}};
  if (s.gate_index != 0) out["gate"] = s.gate_index;
  if (s.phi.size() != 0) out["phi"] = vector_to_json(s.phi);
  return out;
}

inline std::string complex_text(Complex z) {
  const double re = std::abs(z.real()) < 5e-5 ? 0.0 : z.real();
  const double im = std::abs(z.imag()) < 5e-5 ? 0.0 : z.imag();
  char buf[64];
  if (im == 0)
    std::snprintf(buf, sizeof buf, "%.4f", re);
  else if (re == 0)
    std::snprintf(buf, sizeof buf, "%.4fi", im);
  else
    std::snprintf(buf, sizeof buf, "%.4f%+.4fi", re, im);
  return buf;
}

inline std::string vector_text(const CVector& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + complex_text(v[i]);
  return out + "]";
}

// ---- diagnosis results ----

inline nlohmann::json result_to_json(const DiagnosisResult& r) {
  nlohmann::json tests = nlohmann::json::object();
  for (const auto& [q, emp] : r.empirical) {
    nlohmann::json entry{{"empirical", triplet_to_json(emp)}};
    if (auto it = r.counts.find(q); it != r.counts.end())
      entry["counts"] = {it->second.zero, it->second.one, it->second.unknown};
    tests[std::to_string(q)] = entry;
  }
  return {{"verdict", r.verdict},          {"evaluations_used", r.evaluations_used},
          {"test_sequence", r.test_sequence}, {"tests", tests},
          {"scores", r.scores},            {"survivors", r.survivors},
          {"survivor_history", r.survivor_history}};
}

}  // namespace qfd
