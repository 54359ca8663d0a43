#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qfd/circuit.hpp"
#include "qfd/faults.hpp"
#include "qfd/linalg.hpp"

namespace qfd::testing {

inline std::string data_path(const std::string& name) { return std::string(QFD_DATA_DIR) + "/" + name; }

inline CVector random_state(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(dim);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v.normalized();
}

// Gram-Schmidt on complex Gaussian columns.
inline CMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::vector<CVector> cols;
  while (cols.size() < dim) {
    CVector v = random_state(dim, rng);
    for (const auto& c : cols) v -= inner(c, v) * c;
    if (v.norm() < 1e-6) continue;
    cols.push_back(v.normalized());
  }
  CMatrix u(dim, dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < dim; ++i) u(i, j) = cols[j][i];
  return u;
}

// Unitary with prescribed eigenphases (value e^{-i theta}) in a random eigenbasis.
inline CMatrix unitary_with_phases(const std::vector<double>& phases, std::mt19937_64& rng) {
  const CMatrix v = random_unitary(phases.size(), rng);
  std::vector<Complex> d;
  for (double t : phases) d.push_back(std::polar(1.0, -t));
  return matmul(v, matmul(CMatrix::diagonal(d), adjoint(v)));
}

inline std::vector<std::size_t> distinct_qubits(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  return all;
}

inline GateKind random_kind(std::size_t max_arity, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (;;) {
    switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
      case 0: return GateKind::h();
      case 1: return GateKind::x();
      case 2: return GateKind::y();
      case 3: return GateKind::z();
      case 4: return GateKind::phase();
      case 5: if (max_arity >= 2) return GateKind::cnot(); break;
      case 6: if (max_arity >= 3) return GateKind::toffoli(); break;
      case 7: return GateKind::ry(angle(rng));
      case 8: return GateKind::rz(angle(rng));
      default: {
        const std::size_t arity = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(2, max_arity))(rng);
        return GateKind::custom_matrix(random_unitary(std::size_t{1} << arity, rng));
      }
    }
  }
}

inline Circuit random_circuit(std::size_t n, std::size_t s, std::mt19937_64& rng) {
  Circuit c(n);
  for (std::size_t i = 0; i < s; ++i) {
    GateKind k = random_kind(n, rng);
    const std::size_t arity = k.arity();
    c.add(std::move(k), distinct_qubits(n, arity, rng));
  }
  return c;
}

}  // namespace qfd::testing
