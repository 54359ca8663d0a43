#pragma once

// Helstrom measurement for one gate: Test(i).
//
// With k e^{i kappa} = <psi|psi'>, r1,2 = (sqrt(1+k) +- sqrt(1-k)) / 2 and
// d = r1^2 - r2^2 = sqrt(1 - k^2), the measurement basis of span{psi, psi'} is
//   w+ = ( r1 psi - r2 e^{-i kappa} psi' ) / d
//   w- = ( -r2 psi + r1 e^{-i kappa} psi' ) / d
// so that psi = r1 w+ + r2 w- and psi' = e^{i kappa} (r2 w+ + r1 w-).
// Outcome 0 <-> w+, outcome 1 <-> w-, '?' <-> the orthogonal complement.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "qfd/circuit.hpp"
#include "qfd/errors.hpp"
#include "qfd/faults.hpp"
#include "qfd/linalg.hpp"
#include "qfd/separator.hpp"

namespace qfd {

inline constexpr double kUndetectableK = 1 - 1e-9;

enum class Outcome { Zero = 0, One = 1, Unknown = 2 };

inline char outcome_symbol(Outcome o) { return o == Outcome::Zero ? '0' : o == Outcome::One ? '1' : '?'; }

struct OutcomeTriplet {
  double p0 = 0;
  double p1 = 0;
  double p_unknown = 0;

  double operator[](Outcome o) const { return o == Outcome::Zero ? p0 : o == Outcome::One ? p1 : p_unknown; }
  double sum() const { return p0 + p1 + p_unknown; }
  std::array<double, 3> array() const { return {p0, p1, p_unknown}; }

  friend bool operator==(const OutcomeTriplet&, const OutcomeTriplet&) = default;
};

inline double l1_distance(const OutcomeTriplet& a, const OutcomeTriplet& b) {
  return std::abs(a.p0 - b.p0) + std::abs(a.p1 - b.p1) + std::abs(a.p_unknown - b.p_unknown);
}

inline double tv_distance(const OutcomeTriplet& a, const OutcomeTriplet& b) { return l1_distance(a, b) / 2; }

// Minimum error of telling two pure states with overlap modulus k apart.
inline double error_probability(double k) {
  if (!(k >= -1e-12 && k <= 1 + 1e-12)) throw Error("error_probability: overlap " + std::to_string(k) + " outside [0,1]");
  k = std::clamp(k, 0.0, 1.0);
  return (1 - std::sqrt(1 - k * k)) / 2;
}

struct HelstromTest {
  std::size_t gate_index = 0;
  CVector input_state;  // phi
  CVector psi;          // C^0 phi
  CVector psi_faulty;   // C^i phi
  CVector omega_plus;
  CVector omega_minus;
  double delta = 0;
  double k = 0;
  double kappa = 0;
  double r1 = 1;
  double r2 = 0;
  SeparatorSolution separator;

  // Dense projectors, for inspection at small n.
  CMatrix projector_zero() const { return CMatrix::outer(omega_plus, omega_plus); }
  CMatrix projector_one() const { return CMatrix::outer(omega_minus, omega_minus); }
  CMatrix projector_unknown() const {
    return CMatrix::identity(omega_plus.size()) - projector_zero() - projector_one();
  }

  // Outcome distribution for a given output state.
  OutcomeTriplet measure(const CVector& sigma) const {
    const double p0 = std::norm(inner(omega_plus, sigma));
    const double p1 = std::norm(inner(omega_minus, sigma));
    const double total = sigma.norm() * sigma.norm();
    return {p0, p1, std::max(0.0, total - p0 - p1)};
  }
};

inline HelstromTest build_test(const Circuit& c, const FaultSpec& spec, std::size_t i,
                               RotationConvention conv = RotationConvention::HalfAngle) {
  HelstromTest t;
  t.gate_index = i;
  t.separator = circuit_separator(c, spec, i, conv);
  t.input_state = t.separator.phi;
  t.psi = apply(c, t.input_state, conv);
  t.psi_faulty = apply(faulty_variant(c, spec, i), t.input_state, conv);

  const Complex overlap = inner(t.psi, t.psi_faulty);
  t.k = std::min(1.0, std::abs(overlap));
  if (t.k >= kUndetectableK)
    throw UndetectableFault(i, "gate " + std::to_string(i) +
                                   ": faulty and fault-free outputs coincide for every input (k = 1)");
  t.kappa = t.k < kZeroOverlap ? 0.0 : std::arg(overlap);
  t.delta = error_probability(t.k);
  t.r1 = (std::sqrt(1 + t.k) + std::sqrt(1 - t.k)) / 2;
  t.r2 = (std::sqrt(1 + t.k) - std::sqrt(1 - t.k)) / 2;

  CVector wp, wm;
  if (t.k < kZeroOverlap) {
    wp = t.psi;
    wm = t.psi_faulty;
  } else {
    const Complex e1 = std::polar(1.0, -t.kappa);
    const double d = t.r1 * t.r1 - t.r2 * t.r2;
    wp = Complex(t.r1 / d) * t.psi - (t.r2 * e1 / d) * t.psi_faulty;
    wm = Complex(-t.r2 / d) * t.psi + (t.r1 * e1 / d) * t.psi_faulty;
  }

  // One Gram-Schmidt pass against floating-point drift.
  const double np = wp.norm();
  CVector wp_n = (1.0 / np) * wp;
  const Complex proj = inner(wp_n, wm);
  CVector wm_o = wm - proj * wp_n;
  const double nm = wm_o.norm();
  CVector wm_n = (1.0 / nm) * wm_o;
  const double drift = std::max({std::abs(np - 1), std::abs(proj), std::abs(nm - 1)});
  if (drift > 1e-8)
    throw Error("helstrom basis drifted by " + std::to_string(drift) + " for gate " + std::to_string(i));
  t.omega_plus = std::move(wp_n);
  t.omega_minus = std::move(wm_n);
  return t;
}

// Outcome probabilities of Test(i) run on a circuit variant.
inline OutcomeTriplet outcome_probs(const HelstromTest& test, const Circuit& variant,
                                    RotationConvention conv = RotationConvention::HalfAngle) {
  return test.measure(apply(variant, test.input_state, conv));
}

}  // namespace qfd
