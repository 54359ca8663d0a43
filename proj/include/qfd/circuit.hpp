#pragma once

// Gate library, circuit IR, statevector simulation and the circuit text format.
//
// Basis ordering: qubit 0 is the most significant bit of a computational-basis
// index. Multi-qubit gates list their controls before their target.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qfd/errors.hpp"
#include "qfd/linalg.hpp"

namespace qfd {

enum class RotationConvention {
  HalfAngle,  // Ry(t) = exp(-i t Y / 2), Rz(t) = diag(e^{-it/2}, e^{it/2})
  FullAngle,  // same matrices with t in place of t/2
};

inline std::string to_string(RotationConvention c) { return c == RotationConvention::HalfAngle ? "half" : "full"; }

inline RotationConvention parse_convention(std::string_view s) {
  if (s == "half") return RotationConvention::HalfAngle;
  if (s == "full") return RotationConvention::FullAngle;
  throw Error("unknown rotation convention '" + std::string(s) + "' (expected half or full)");
}

enum class GateName { H, X, Y, Z, Phase, CNOT, Toffoli, RY, RZ, Custom };

struct GateKind {
  GateName name = GateName::H;
  double angle = 0;  // RY / RZ only
  CMatrix custom;    // Custom only

  static GateKind h() { return {GateName::H, 0, {}}; }
  static GateKind x() { return {GateName::X, 0, {}}; }
  static GateKind y() { return {GateName::Y, 0, {}}; }
  static GateKind z() { return {GateName::Z, 0, {}}; }
  static GateKind phase() { return {GateName::Phase, 0, {}}; }
  static GateKind cnot() { return {GateName::CNOT, 0, {}}; }
  static GateKind toffoli() { return {GateName::Toffoli, 0, {}}; }
  static GateKind ry(double theta) { return {GateName::RY, theta, {}}; }
  static GateKind rz(double theta) { return {GateName::RZ, theta, {}}; }
  static GateKind custom_matrix(CMatrix m, double tol = 1e-8) {
    if (!m.square() || m.rows() < 2 || m.rows() > 8 || (m.rows() & (m.rows() - 1)) != 0)
      throw DimensionError("custom gate must be 2x2, 4x4 or 8x8");
    if (!is_unitary(m, tol)) throw NotUnitaryError("custom gate matrix is not unitary");
    return {GateName::Custom, 0, std::move(m)};
  }

  std::size_t arity() const {
    switch (name) {
      case GateName::CNOT: return 2;
      case GateName::Toffoli: return 3;
      case GateName::Custom: return static_cast<std::size_t>(std::countr_zero(custom.rows()));
      default: return 1;
    }
  }

  friend bool operator==(const GateKind&, const GateKind&) = default;
};

inline std::string gate_label(GateName n) {
  switch (n) {
    case GateName::H: return "h";
    case GateName::X: return "x";
    case GateName::Y: return "y";
    case GateName::Z: return "z";
    case GateName::Phase: return "phase";
    case GateName::CNOT: return "cnot";
    case GateName::Toffoli: return "toffoli";
    case GateName::RY: return "ry";
    case GateName::RZ: return "rz";
    case GateName::Custom: return "custom";
  }
  return "?";
}

inline CMatrix gate_matrix(const GateKind& kind, RotationConvention conv = RotationConvention::HalfAngle) {
  using namespace std::complex_literals;
  const double r2 = 1 / std::numbers::sqrt2;
  const double half = conv == RotationConvention::HalfAngle ? kind.angle / 2 : kind.angle;
  switch (kind.name) {
    case GateName::H: return CMatrix{{r2, r2}, {r2, -r2}};
    case GateName::X: return CMatrix{{0., 1.}, {1., 0.}};
    case GateName::Y: return CMatrix{{0., -1i}, {1i, 0.}};
    case GateName::Z: return CMatrix::diagonal({1., -1.});
    case GateName::Phase: return CMatrix::diagonal({1., 1i});
    case GateName::CNOT: {
      CMatrix m(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
    }
    case GateName::Toffoli: {
      CMatrix m = CMatrix::identity(8);
      m(6, 6) = m(7, 7) = 0;
      m(6, 7) = m(7, 6) = 1;
      return m;
    }
    case GateName::RY:
      return CMatrix{{std::cos(half), -std::sin(half)}, {std::sin(half), std::cos(half)}};
    case GateName::RZ: return CMatrix::diagonal({std::polar(1.0, -half), std::polar(1.0, half)});
    case GateName::Custom: return kind.custom;
  }
  throw Error("unreachable gate kind");
}

struct PlacedGate {
  GateKind kind;
  std::vector<std::size_t> qubits;

  friend bool operator==(const PlacedGate&, const PlacedGate&) = default;
};

struct Circuit {
  std::size_t n = 0;
  std::vector<PlacedGate> gates;  // application order; gate i (1-based) is gates[i-1]

  explicit Circuit(std::size_t qubits = 0) : n(qubits) {
    if (n > kMaxQubits) throw DimensionError("circuits are limited to " + std::to_string(kMaxQubits) + " qubits");
  }

  std::size_t size() const noexcept { return gates.size(); }
  std::size_t dim() const noexcept { return std::size_t{1} << n; }

  Circuit& add(GateKind kind, std::vector<std::size_t> qubits) {
    if (qubits.size() != kind.arity())
      throw DimensionError(gate_label(kind.name) + " acts on " + std::to_string(kind.arity()) + " qubit(s), got " +
                           std::to_string(qubits.size()));
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      if (qubits[i] >= n) throw IndexError("qubit q" + std::to_string(qubits[i]) + " out of range");
      for (std::size_t j = 0; j < i; ++j)
        if (qubits[i] == qubits[j]) throw IndexError("qubit q" + std::to_string(qubits[i]) + " repeated in one gate");
    }
    gates.push_back(PlacedGate{std::move(kind), std::move(qubits)});
    return *this;
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

namespace detail {

inline std::size_t bit_of(std::size_t qubit, std::size_t n) { return std::size_t{1} << (n - 1 - qubit); }

// offsets[r] is the basis-index contribution of the gate-local index r.
inline std::vector<std::size_t> local_offsets(const std::vector<std::size_t>& qubits, std::size_t n) {
  const std::size_t k = qubits.size();
  std::vector<std::size_t> offs(std::size_t{1} << k, 0);
  for (std::size_t r = 0; r < offs.size(); ++r)
    for (std::size_t j = 0; j < k; ++j)
      if ((r >> (k - 1 - j)) & 1) offs[r] |= bit_of(qubits[j], n);
  return offs;
}

inline void apply_local(const CMatrix& u, const std::vector<std::size_t>& qubits, std::size_t n, CVector& state) {
  const auto offs = local_offsets(qubits, n);
  std::size_t mask = 0;
  for (auto q : qubits) mask |= bit_of(q, n);
  const std::size_t m = offs.size();
  std::vector<Complex> in(m), out(m);
  for (std::size_t base = 0; base < state.size(); ++base) {
    if (base & mask) continue;
    for (std::size_t r = 0; r < m; ++r) in[r] = state[base | offs[r]];
    for (std::size_t r = 0; r < m; ++r) {
      Complex s{};
      for (std::size_t c = 0; c < m; ++c) s += u(r, c) * in[c];
      out[r] = s;
    }
    for (std::size_t r = 0; r < m; ++r) state[base | offs[r]] = out[r];
  }
}

inline void check_state(const Circuit& c, const CVector& state) {
  if (state.size() != c.dim())
    throw DimensionError("state has dimension " + std::to_string(state.size()) + ", circuit needs " +
                         std::to_string(c.dim()));
}

}  // namespace detail

// Full 2^n x 2^n operator of a gate acting on its qubits. Test oracle and small-n helper.
inline CMatrix embed(const CMatrix& u, const std::vector<std::size_t>& qubits, std::size_t n) {
  if (n > kMaxQubits) throw DimensionError("embed: more than 12 qubits");
  if (u.rows() != (std::size_t{1} << qubits.size())) throw DimensionError("embed: matrix does not match qubit count");
  for (auto q : qubits)
    if (q >= n) throw IndexError("embed: qubit q" + std::to_string(q) + " out of range for n=" + std::to_string(n));
  const std::size_t dim = std::size_t{1} << n;
  const auto offs = detail::local_offsets(qubits, n);
  std::size_t mask = 0;
  for (auto q : qubits) mask |= detail::bit_of(q, n);
  CMatrix out(dim, dim);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t r = 0; r < offs.size(); ++r)
      for (std::size_t c = 0; c < offs.size(); ++c) out(base | offs[r], base | offs[c]) = u(r, c);
  }
  return out;
}

inline CMatrix embed(const PlacedGate& g, std::size_t n, RotationConvention conv = RotationConvention::HalfAngle) {
  return embed(gate_matrix(g.kind, conv), g.qubits, n);
}

inline CVector apply(const Circuit& c, CVector state, RotationConvention conv = RotationConvention::HalfAngle) {
  detail::check_state(c, state);
  for (const auto& g : c.gates) detail::apply_local(gate_matrix(g.kind, conv), g.qubits, c.n, state);
  return state;
}

// Applies C^H: gates in reverse order, each adjointed.
inline CVector apply_adjoint(const Circuit& c, CVector state, RotationConvention conv = RotationConvention::HalfAngle) {
  detail::check_state(c, state);
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it)
    detail::apply_local(adjoint(gate_matrix(it->kind, conv)), it->qubits, c.n, state);
  return state;
}

// embed(G^s) ... embed(G^1). Dense; intended for small n.
inline CMatrix unitary(const Circuit& c, RotationConvention conv = RotationConvention::HalfAngle) {
  CMatrix u = CMatrix::identity(c.dim());
  for (const auto& g : c.gates) u = matmul(embed(g, c.n, conv), u);
  return u;
}

struct CircuitSplit {
  Circuit prefix;  // gates 1..i-1
  PlacedGate gate;
  Circuit suffix;  // gates i+1..s
};

// C = suffix * gate * prefix around 1-based gate index i.
inline CircuitSplit split(const Circuit& c, std::size_t i) {
  if (i < 1 || i > c.size())
    throw IndexError("gate index " + std::to_string(i) + " outside 1.." + std::to_string(c.size()));
  CircuitSplit out{Circuit(c.n), c.gates[i - 1], Circuit(c.n)};
  out.prefix.gates.assign(c.gates.begin(), c.gates.begin() + static_cast<std::ptrdiff_t>(i - 1));
  out.suffix.gates.assign(c.gates.begin() + static_cast<std::ptrdiff_t>(i), c.gates.end());
  return out;
}

inline Circuit concat(const Circuit& first, const Circuit& second) {
  if (first.n != second.n) throw DimensionError("concat: qubit counts differ");
  Circuit out = first;
  out.gates.insert(out.gates.end(), second.gates.begin(), second.gates.end());
  return out;
}

// ---------------------------------------------------------------------------
// Text format
//
//   qubits <n>
//   gate <name>[(<angle-expr>)] q<i> [q<j> [q<k>]] [<matrix>]
//
// '#' starts a comment. Names are case-insensitive. <angle-expr> is a product
// or quotient of numbers and 'pi', with optional unary minus. custom gates
// carry a trailing JSON matrix: rows of entries, each a number or [re, im].

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

class AngleParser {
 public:
  AngleParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  double parse() {
    double v = factor();
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size()) break;
      const char op = s_[pos_];
      if (op != '*' && op != '/') fail("unexpected '" + std::string(1, op) + "'");
      ++pos_;
      const double rhs = factor();
      if (op == '*') {
        v *= rhs;
      } else {
        if (rhs == 0) fail("division by zero");
        v /= rhs;
      }
    }
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, "bad angle expression '" + std::string(s_) + "': " + msg);
  }
  double factor() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected a number or 'pi'");
    if (s_[pos_] == '-') {
      ++pos_;
      return -factor();
    }
    if (s_[pos_] == '+') {
      ++pos_;
      return factor();
    }
    if (lower(s_.substr(pos_, 2)) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("expected a number or 'pi'");
    }
    pos_ += used;
    return v;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline Complex json_complex(const nlohmann::json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw Error("matrix entry must be a number or [re, im]");
}

}  // namespace detail

// Rows of entries; each entry a number or [re, im].
inline CMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw Error("matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw Error("matrix rows must be arrays");
  const std::size_t cols = j[0].size();
  CMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw Error("matrix rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = detail::json_complex(j[r][c]);
  }
  return m;
}

inline nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Circuit parse_circuit(std::string_view text) {
  std::optional<Circuit> circuit;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    std::istringstream in{std::string(line)};
    std::string keyword;
    in >> keyword;
    keyword = detail::lower(keyword);

    if (keyword == "qubits") {
      if (circuit) throw ParseError(line_no, "duplicate 'qubits' declaration");
      std::string count, extra;
      in >> count;
      if (count.empty() || !std::all_of(count.begin(), count.end(), [](unsigned char ch) { return std::isdigit(ch); }))
        throw ParseError(line_no, "expected a qubit count after 'qubits'");
      if (in >> extra) throw ParseError(line_no, "unexpected token '" + extra + "'");
      const unsigned long n = std::stoul(count);
      if (n == 0 || n > kMaxQubits)
        throw ParseError(line_no, "qubit count must be in 1.." + std::to_string(kMaxQubits));
      circuit.emplace(n);
    } else if (keyword == "gate") {
      if (!circuit) throw ParseError(line_no, "'gate' before 'qubits' declaration");
      // gate token may contain a parenthesized angle with spaces inside
      std::string rest(detail::trim(line.substr(4)));
      std::string head;
      std::size_t cut = 0;
      const auto paren = rest.find('(');
      const auto space = rest.find_first_of(" \t");
      if (paren != std::string::npos && (space == std::string::npos || paren < space)) {
        const auto close = rest.find(')', paren);
        if (close == std::string::npos) throw ParseError(line_no, "missing ')'");
        head = rest.substr(0, close + 1);
        cut = close + 1;
      } else {
        head = rest.substr(0, space);
        cut = space == std::string::npos ? rest.size() : space;
      }
      std::string name = detail::lower(head.substr(0, head.find('(')));
      std::optional<double> angle;
      if (const auto p = head.find('('); p != std::string::npos)
        angle = detail::AngleParser(std::string_view(head).substr(p + 1, head.size() - p - 2), line_no).parse();

      GateKind kind;
      if (name == "h") kind = GateKind::h();
      else if (name == "x") kind = GateKind::x();
      else if (name == "y") kind = GateKind::y();
      else if (name == "z") kind = GateKind::z();
      else if (name == "phase" || name == "s") kind = GateKind::phase();
      else if (name == "cnot" || name == "cx") kind = GateKind::cnot();
      else if (name == "toffoli" || name == "ccx") kind = GateKind::toffoli();
      else if (name == "ry" || name == "rz") {
        if (!angle) throw ParseError(line_no, name + " needs an angle, e.g. " + name + "(pi/6)");
        kind = name == "ry" ? GateKind::ry(*angle) : GateKind::rz(*angle);
      } else if (name == "custom") {
        kind.name = GateName::Custom;
      } else {
        throw ParseError(line_no, "unknown gate '" + name + "'");
      }
      if (angle && name != "ry" && name != "rz") throw ParseError(line_no, name + " takes no angle");

      std::vector<std::size_t> qubits;
      std::string tail = rest.substr(cut);
      std::size_t i = 0;
      for (;;) {
        while (i < tail.size() && std::isspace(static_cast<unsigned char>(tail[i]))) ++i;
        if (i >= tail.size() || (tail[i] != 'q' && tail[i] != 'Q')) break;
        std::size_t j = i + 1;
        while (j < tail.size() && std::isdigit(static_cast<unsigned char>(tail[j]))) ++j;
        if (j == i + 1) throw ParseError(line_no, "malformed qubit reference");
        if (j < tail.size() && !std::isspace(static_cast<unsigned char>(tail[j])) && tail[j] != '[')
          throw ParseError(line_no, "malformed qubit reference");
        qubits.push_back(std::stoul(tail.substr(i + 1, j - i - 1)));
        i = j;
      }
      const std::string remainder(detail::trim(std::string_view(tail).substr(std::min(i, tail.size()))));

      if (kind.name == GateName::Custom) {
        if (remainder.empty()) throw ParseError(line_no, "custom gate needs a matrix");
        try {
          kind = GateKind::custom_matrix(matrix_from_json(nlohmann::json::parse(remainder)));
        } catch (const nlohmann::json::exception& e) {
          throw ParseError(line_no, std::string("bad custom matrix: ") + e.what());
        } catch (const Error& e) {
          throw ParseError(line_no, e.what());
        }
      } else if (!remainder.empty()) {
        throw ParseError(line_no, "unexpected text '" + remainder + "'");
      }

      if (qubits.size() != kind.arity())
        throw ParseError(line_no, name + " expects " + std::to_string(kind.arity()) + " qubit(s), got " +
                                      std::to_string(qubits.size()));
      try {
        circuit->add(std::move(kind), std::move(qubits));
      } catch (const Error& e) {
        throw ParseError(line_no, e.what());
      }
    } else {
      throw ParseError(line_no, "expected 'qubits' or 'gate', got '" + keyword + "'");
    }
    if (eol == text.size()) break;
  }
  if (!circuit) throw ParseError(0, "missing 'qubits' declaration");
  return *circuit;
}

inline std::string serialize_circuit(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.n << "\n";
  char buf[64];
  for (const auto& g : c.gates) {
    out << "gate " << gate_label(g.kind.name);
    if (g.kind.name == GateName::RY || g.kind.name == GateName::RZ) {
      std::snprintf(buf, sizeof buf, "%.17g", g.kind.angle);
      out << "(" << buf << ")";
    }
    for (auto q : g.qubits) out << " q" << q;
    if (g.kind.name == GateName::Custom) {
      out << " " << matrix_to_json(g.kind.custom).dump();
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace qfd
