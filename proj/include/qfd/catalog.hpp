#pragma once

// Missing-gate separators for the built-in gate library.

#include <numbers>
#include <string>
#include <vector>

#include "qfd/circuit.hpp"
#include "qfd/helstrom.hpp"
#include "qfd/separator.hpp"

namespace qfd {

struct CatalogEntry {
  std::string label;
  GateKind kind;
  SeparatorSolution separator;
  double delta = 0;
};

inline std::vector<std::pair<std::string, GateKind>> catalog_gates() {
  using std::numbers::pi;
  return {{"Hadamard", GateKind::h()},   {"Phase", GateKind::phase()},     {"CNOT", GateKind::cnot()},
          {"Ry(pi/6)", GateKind::ry(pi / 6)}, {"Rz(pi/16)", GateKind::rz(pi / 16)}, {"Toffoli", GateKind::toffoli()},
          {"X", GateKind::x()},          {"Y", GateKind::y()},             {"Z", GateKind::z()}};
}

inline std::vector<CatalogEntry> missing_gate_catalog(RotationConvention conv = RotationConvention::HalfAngle) {
  std::vector<CatalogEntry> out;
  for (auto& [label, kind] : catalog_gates()) {
    const CMatrix g = gate_matrix(kind, conv);
    SeparatorSolution sep = gate_separator(g, CMatrix::identity(g.rows()));
    const double delta = error_probability(sep.k);
    out.push_back({label, kind, std::move(sep), delta});
  }
  return out;
}

}  // namespace qfd
