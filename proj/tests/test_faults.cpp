#include <gtest/gtest.h>

#include <random>

#include "qfd/faults.hpp"
#include "support.hpp"

using namespace qfd;
using namespace qfd::testing;

namespace {

Circuit reference() {
  return parse_circuit(
      "qubits 3\ngate toffoli q0 q1 q2\ngate h q0\ngate h q2\ngate ry(pi/6) q2\ngate rz(pi/16) q0\ngate cnot q0 q1\n");
}

TEST(FaultyVariant, ZeroIsFaultFree) {
  const Circuit c = reference();
  EXPECT_EQ(faulty_variant(c, {}, 0), c);
}

TEST(FaultyVariant, MissingHadamardLeavesIdentity) {
  Circuit c(1);
  c.add(GateKind::h(), {0});
  const Circuit v = faulty_variant(c, {}, 1);
  EXPECT_EQ(v.size(), 0u);
  EXPECT_EQ(unitary(v), CMatrix::identity(2));
}

TEST(FaultyVariant, MissingRyRemovesOneGate) {
  const Circuit v = faulty_variant(reference(), {}, 4);
  ASSERT_EQ(v.size(), 5u);
  for (const auto& g : v.gates) EXPECT_NE(g.kind.name, GateName::RY);
}

TEST(FaultyVariant, OutOfRange) { EXPECT_THROW(faulty_variant(reference(), {}, 7), IndexError); }

TEST(FaultOperator, MissingToffoliIsIdentity) {
  const Circuit c = reference();
  EXPECT_EQ(fault_operator(c.gates[0], FaultModel::missing_gate()), CMatrix::identity(8));
}

TEST(FaultOperator, ReplaceHadamardWithX) {
  const Circuit c = reference();
  const CMatrix x = gate_matrix(GateKind::x());
  EXPECT_EQ(fault_operator(c.gates[1], FaultModel::replace(x)), x);
}

TEST(FaultOperator, RejectsBadReplacement) {
  const Circuit c = reference();
  EXPECT_THROW(fault_operator(c.gates[1], FaultModel::replace(CMatrix{{1, 1}, {0, 1}})), NotUnitaryError);
  EXPECT_THROW(fault_operator(c.gates[1], FaultModel::replace(CMatrix::identity(4))), DimensionError);
}

TEST(FaultyVariant, UnitaryFactorsAroundFaultyGate) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit c = random_circuit(3, 6, rng);
    FaultSpec spec;
    for (std::size_t i = 1; i <= c.size(); i += 2)
      spec.overrides[i] = FaultModel::replace(random_unitary(std::size_t{1} << c.gates[i - 1].kind.arity(), rng));
    for (std::size_t i = 1; i <= c.size(); ++i) {
      const auto p = split(c, i);
      const CMatrix gf = embed(fault_operator(p.gate, spec.model_for(i)), p.gate.qubits, c.n);
      const CMatrix expected = matmul(unitary(p.suffix), matmul(gf, unitary(p.prefix)));
      EXPECT_LT(max_abs_diff(unitary(faulty_variant(c, spec, i)), expected), 1e-9);
    }
  }
}

TEST(FaultyVariant, MissingIdentityGateChangesNothing) {
  Circuit c(2);
  c.add(GateKind::h(), {0}).add(GateKind::custom_matrix(CMatrix::identity(2)), {1}).add(GateKind::cnot(), {0, 1});
  EXPECT_EQ(unitary(faulty_variant(c, {}, 2)), unitary(c));
}

TEST(FaultSpecJson, RoundTrip) {
  FaultSpec spec;
  spec.overrides[2] = FaultModel::replace(CMatrix{{0, 1}, {1, 0}});
  spec.overrides[5] = FaultModel::replace(CMatrix::diagonal({1, Complex(0, 1)}));
  const auto j = fault_spec_to_json(spec);
  EXPECT_EQ(fault_spec_from_json(j), spec);
  EXPECT_EQ(j["default"], "smgf");
}

TEST(FaultSpecJson, DefaultsToMissingGate) {
  const FaultSpec spec = fault_spec_from_json(nlohmann::json::object());
  EXPECT_EQ(spec.model_for(3).kind, FaultModel::Kind::MissingGate);
}

TEST(FaultSpecJson, Errors) {
  EXPECT_THROW(fault_spec_from_json(nlohmann::json::parse(R"({"overrides": {"x": "smgf"}})")), Error);
  EXPECT_THROW(fault_spec_from_json(nlohmann::json::parse(R"({"overrides": {"0": "smgf"}})")), Error);
  EXPECT_THROW(fault_spec_from_json(nlohmann::json::parse(R"({"default": "stuck"})")), Error);
  EXPECT_THROW(fault_spec_from_json(nlohmann::json::parse(R"({"overrides": {"1": {"kind": "replace", "matrix": [[1, 1], [0, 1]]}}})")),
               NotUnitaryError);
  FaultSpec spec;
  spec.overrides[9] = FaultModel::missing_gate();
  EXPECT_THROW(spec.validate(reference()), IndexError);
}

}  // namespace
