#pragma once

// Optimal separator input states.
//
// For S = G^H G_f with eigenvalues e^{-i theta_j}, the best input minimizes
// |sum_j a_j e^{-i theta_j}| over the probability simplex, i.e. the distance
// from the origin to the convex hull of the eigenvalue points on the unit
// circle. The minimizer is supported on at most three points, so it is found
// exactly by checking antipodal pairs, triangles containing the origin and the
// clamped projection of the origin onto every segment.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qfd/circuit.hpp"
#include "qfd/errors.hpp"
#include "qfd/faults.hpp"
#include "qfd/linalg.hpp"

namespace qfd {

inline constexpr double kPhaseDegeneracy = 1e-8;
inline constexpr double kZeroOverlap = 1e-9;

struct PhaseClass {
  double phase = 0;
  std::vector<CVector> eigenvectors;  // orthonormal basis of the eigenspace
  double weight = 0;
};

struct OptSolution {
  std::vector<double> weights;  // one per input phase, on the simplex
  double k = 1;                 // |sum_j a_j e^{-i theta_j}|
  double kappa = 0;             // its argument, 0 when k is negligible
};

struct SeparatorSolution {
  std::size_t gate_index = 0;  // 1-based; 0 for a bare gate pair
  std::vector<PhaseClass> classes;
  double k = 1;
  double kappa = 0;
  CVector phi_prime;  // gate-level separator, dimension 2^arity
  CVector phi;        // circuit-level input, empty for a bare gate pair
};

namespace detail {

inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline OptSolution finish(std::span<const Complex> z, std::vector<double> w) {
  Complex sum{};
  for (std::size_t j = 0; j < z.size(); ++j) sum += w[j] * z[j];
  OptSolution out{std::move(w), std::abs(sum), 0.0};
  if (out.k >= kZeroOverlap) out.kappa = std::arg(sum);
  return out;
}

}  // namespace detail

// Minimizes |sum_j a_j e^{-i theta_j}| over a_j >= 0, sum a_j = 1.
inline OptSolution solve_opt(std::span<const double> phases) {
  if (phases.empty()) throw Error("solve_opt: no phases");
  const std::size_t m = phases.size();
  std::vector<Complex> z(m);
  for (std::size_t j = 0; j < m; ++j) z[j] = std::polar(1.0, -phases[j]);

  // Closest point of every vertex and segment.
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_w(m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    if (std::abs(z[j]) < best) {
      best = std::abs(z[j]);
      std::fill(best_w.begin(), best_w.end(), 0.0);
      best_w[j] = 1;
    }
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = j + 1; l < m; ++l) {
      const Complex d = z[l] - z[j];
      const double len2 = std::norm(d);
      if (len2 < 1e-300) continue;
      const double t = std::clamp(-(std::conj(z[j]) * d).real() / len2, 0.0, 1.0);
      const double dist = std::abs(z[j] + t * d);
      if (dist < best - 1e-15) {
        best = dist;
        std::fill(best_w.begin(), best_w.end(), 0.0);
        best_w[j] = 1 - t;
        best_w[l] = t;
      }
    }
  if (best <= 1e-12) return detail::finish(z, std::move(best_w));

  // Origin strictly inside some triangle.
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c) {
        const double area = detail::cross(z[b] - z[a], z[c] - z[a]);
        if (std::abs(area) < 1e-14) continue;
        const double la = detail::cross(z[b], z[c]) / area;
        const double lb = detail::cross(z[c], z[a]) / area;
        const double lc = detail::cross(z[a], z[b]) / area;
        if (la < -1e-14 || lb < -1e-14 || lc < -1e-14) continue;
        std::vector<double> w(m, 0.0);
        const double s = std::max(la, 0.0) + std::max(lb, 0.0) + std::max(lc, 0.0);
        w[a] = std::max(la, 0.0) / s;
        w[b] = std::max(lb, 0.0) / s;
        w[c] = std::max(lc, 0.0) / s;
        return detail::finish(z, std::move(w));
      }

  return detail::finish(z, std::move(best_w));
}

// Groups eigenpairs whose phases lie within threshold on the circle.
inline std::vector<PhaseClass> phase_classes(const std::vector<EigenPair>& pairs, double threshold = kPhaseDegeneracy) {
  std::vector<PhaseClass> classes;
  std::vector<Complex> sums;
  for (const auto& p : pairs) {
    if (!classes.empty() && phase_distance(p.phase, classes.back().phase) <= threshold) {
      classes.back().eigenvectors.push_back(p.vector);
      sums.back() += p.value;
      continue;
    }
    classes.push_back(PhaseClass{p.phase, {p.vector}, 0.0});
    sums.push_back(p.value);
  }
  // phases near -pi and +pi are the same point
  if (classes.size() > 1 && phase_distance(classes.front().phase, classes.back().phase) <= threshold) {
    auto& last = classes.back();
    classes.front().eigenvectors.insert(classes.front().eigenvectors.end(), last.eigenvectors.begin(),
                                        last.eigenvectors.end());
    sums.front() += sums.back();
    classes.pop_back();
    sums.pop_back();
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    double ph = wrap_phase(-std::arg(sums[c]));
    if (ph < -std::numbers::pi + 1e-12) ph = std::numbers::pi;
    classes[c].phase = ph;
  }
  return classes;
}

namespace detail {

inline CVector uniform_spread(const std::vector<CVector>& basis) {
  CVector u(basis.front().size());
  for (const auto& v : basis) u += v;
  u *= 1.0 / std::sqrt(static_cast<double>(basis.size()));
  return u;
}

inline void check_pair(const CMatrix& g, const CMatrix& g_f, double tol) {
  if (!g.square() || !g_f.square() || g.rows() != g_f.rows())
    throw DimensionError("gate and faulty operator must be square and of equal size");
  if (!is_unitary(g, tol) || !is_unitary(g_f, tol)) throw NotUnitaryError("gate operators must be unitary");
}

}  // namespace detail

// (G, G_f)-separator. phi is left empty.
//
// Each phase class contributes sqrt(weight) times the uniform superposition of
// its eigenbasis; any spread inside a class gives the same overlap.
inline SeparatorSolution gate_separator(const CMatrix& g, const CMatrix& g_f, double tol = 1e-8) {
  detail::check_pair(g, g_f, tol);
  const CMatrix s = matmul(adjoint(g), g_f);
  SeparatorSolution sol;
  sol.classes = phase_classes(eig_unitary(s, tol));

  std::vector<double> phases;
  for (const auto& c : sol.classes) phases.push_back(c.phase);
  const OptSolution opt = solve_opt(phases);
  sol.k = opt.k;
  sol.kappa = opt.kappa;

  sol.phi_prime = CVector(g.rows());
  for (std::size_t c = 0; c < sol.classes.size(); ++c) {
    sol.classes[c].weight = opt.weights[c];
    if (opt.weights[c] == 0) continue;
    sol.phi_prime += std::sqrt(opt.weights[c]) * detail::uniform_spread(sol.classes[c].eigenvectors);
  }
  return sol;
}

// (|v1> + |v2>)/sqrt(2) for 2x2 operators with two distinct eigenphases.
// Optimal exactly when the equal-weight split is, which gate_separator reports.
inline CVector single_qubit_shortcut(const CMatrix& g, const CMatrix& g_f, double tol = 1e-8) {
  detail::check_pair(g, g_f, tol);
  if (g.rows() != 2) throw DimensionError("single_qubit_shortcut needs 2x2 operators");
  const auto pairs = eig_unitary(matmul(adjoint(g), g_f), tol);
  CVector out = pairs[0].vector + pairs[1].vector;
  out *= 1 / std::numbers::sqrt2;
  return out;
}

// Places a gate-local state on the given qubits with |0> everywhere else.
inline CVector lift_state(const CVector& local, const std::vector<std::size_t>& qubits, std::size_t n) {
  if (local.size() != (std::size_t{1} << qubits.size())) throw DimensionError("lift_state: local state size mismatch");
  const auto offs = detail::local_offsets(qubits, n);
  CVector out(std::size_t{1} << n);
  for (std::size_t r = 0; r < offs.size(); ++r) out[offs[r]] = local[r];
  return out;
}

// (C^0, C^i)-separator: the gate separator lifted to n qubits and run backwards through C_1.
inline SeparatorSolution circuit_separator(const Circuit& c, const FaultSpec& spec, std::size_t i,
                                           RotationConvention conv = RotationConvention::HalfAngle) {
  const CircuitSplit parts = split(c, i);
  SeparatorSolution sol =
      gate_separator(gate_matrix(parts.gate.kind, conv), fault_operator(parts.gate, spec.model_for(i)));
  sol.gate_index = i;
  sol.phi = apply_adjoint(parts.prefix, lift_state(sol.phi_prime, parts.gate.qubits, c.n), conv);
  return sol;
}

}  // namespace qfd
