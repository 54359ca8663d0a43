#pragma once

// Single-gate fault models and the faulty circuit variants C^i.

#include <cstddef>
#include <map>
#include <string>
#include <exception>
#include <utility>

#include "qfd/circuit.hpp"
#include "qfd/errors.hpp"
#include "qfd/linalg.hpp"

namespace qfd {

struct FaultModel {
  enum class Kind { MissingGate, Replace };

  Kind kind = Kind::MissingGate;
  CMatrix replacement;  // Replace only

  static FaultModel missing_gate() { return {}; }
  static FaultModel replace(CMatrix m) { return {Kind::Replace, std::move(m)}; }

  friend bool operator==(const FaultModel&, const FaultModel&) = default;
};

// Fault model per 1-based gate index; gates without an override use the default.
struct FaultSpec {
  FaultModel fallback = FaultModel::missing_gate();
  std::map<std::size_t, FaultModel> overrides;

  const FaultModel& model_for(std::size_t gate_index) const {
    auto it = overrides.find(gate_index);
    return it == overrides.end() ? fallback : it->second;
  }

  // Throws if an override names a gate the circuit does not have.
  void validate(const Circuit& c) const {
    for (const auto& [i, m] : overrides)
      if (i < 1 || i > c.size())
        throw IndexError("fault override for gate " + std::to_string(i) + " but circuit has " +
                         std::to_string(c.size()) + " gates");
  }

  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

inline constexpr double kReplacementUnitaryTol = 1e-8;

// G_f for the gate: identity for a missing gate, the replacement otherwise.
inline CMatrix fault_operator(const PlacedGate& g, const FaultModel& m) {
  const std::size_t dim = std::size_t{1} << g.qubits.size();
  if (m.kind == FaultModel::Kind::MissingGate) return CMatrix::identity(dim);
  if (m.replacement.rows() != dim || m.replacement.cols() != dim)
    throw DimensionError("replacement is " + std::to_string(m.replacement.rows()) + "x" +
                         std::to_string(m.replacement.cols()) + ", gate needs " + std::to_string(dim) + "x" +
                         std::to_string(dim));
  if (!is_unitary(m.replacement, kReplacementUnitaryTol)) throw NotUnitaryError("replacement matrix is not unitary");
  return m.replacement;
}

// C^i: gate i swapped for its faulty operator. i = 0 is the fault-free circuit.
// A missing gate is removed from the gate list.
inline Circuit faulty_variant(const Circuit& c, const FaultSpec& spec, std::size_t i) {
  if (i > c.size()) throw IndexError("variant index " + std::to_string(i) + " outside 0.." + std::to_string(c.size()));
  if (i == 0) return c;
  Circuit out = c;
  const FaultModel& m = spec.model_for(i);
  if (m.kind == FaultModel::Kind::MissingGate) {
    out.gates.erase(out.gates.begin() + static_cast<std::ptrdiff_t>(i - 1));
  } else {
    out.gates[i - 1].kind = GateKind::custom_matrix(fault_operator(c.gates[i - 1], m), kReplacementUnitaryTol);
  }
  return out;
}

// {"default": "smgf", "overrides": {"<gate-index>": {"kind": "replace", "matrix": [[...]]}}}
// Matrix entries are numbers or [re, im] pairs.
inline FaultModel fault_model_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "smgf") return FaultModel::missing_gate();
    throw Error("unknown fault kind '" + j.get<std::string>() + "'");
  }
  if (!j.is_object() || !j.contains("kind")) throw Error("fault model must be \"smgf\" or an object with a kind");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "smgf") return FaultModel::missing_gate();
  if (kind == "replace") {
    if (!j.contains("matrix")) throw Error("replace fault needs a matrix");
    CMatrix m = matrix_from_json(j.at("matrix"));
    if (!m.square() || !is_unitary(m, kReplacementUnitaryTol)) throw NotUnitaryError("replacement matrix is not unitary");
    return FaultModel::replace(std::move(m));
  }
  throw Error("unknown fault kind '" + kind + "'");
}

inline nlohmann::json fault_model_to_json(const FaultModel& m) {
  if (m.kind == FaultModel::Kind::MissingGate) return {{"kind", "smgf"}};
  return {{"kind", "replace"}, {"matrix", matrix_to_json(m.replacement)}};
}

inline FaultSpec fault_spec_from_json(const nlohmann::json& j) {
  FaultSpec spec;
  if (!j.is_object()) throw Error("fault spec must be a JSON object");
  if (j.contains("default")) spec.fallback = fault_model_from_json(j.at("default"));
  if (j.contains("overrides")) {
    for (const auto& [key, value] : j.at("overrides").items()) {
      std::size_t used = 0;
      unsigned long idx = 0;
      try {
        idx = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || idx == 0) throw Error("override key '" + key + "' is not a gate index >= 1");
      spec.overrides[idx] = fault_model_from_json(value);
    }
  }
  return spec;
}

inline nlohmann::json fault_spec_to_json(const FaultSpec& spec) {
  nlohmann::json out;
  out["default"] = spec.fallback.kind == FaultModel::Kind::MissingGate ? nlohmann::json("smgf")
                                                                       : fault_model_to_json(spec.fallback);
  out["overrides"] = nlohmann::json::object();
  for (const auto& [i, m] : spec.overrides) out["overrides"][std::to_string(i)] = fault_model_to_json(m);
  return out;
}

}  // namespace qfd
