#pragma once

// Diagnostic tables and seeded diagnosis campaigns.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qfd/circuit.hpp"
#include "qfd/errors.hpp"
#include "qfd/faults.hpp"
#include "qfd/hash.hpp"
#include "qfd/helstrom.hpp"

namespace qfd {

struct TableRow {
  std::size_t test = 0;  // 1-based gate index q
  bool detectable = true;
  std::string note;  // reason when not detectable
  double delta = 0;
  double k = 0;
  std::vector<OutcomeTriplet> cells;  // r = 0..s, empty when not detectable
};

struct DiagnosticTable {
  std::size_t n = 0;
  std::size_t s = 0;
  RotationConvention convention = RotationConvention::HalfAngle;
  std::string circuit_hash;
  std::string fault_hash;
  std::vector<TableRow> rows;  // rows[q - 1]

  const TableRow& row(std::size_t q) const {
    if (q < 1 || q > rows.size()) throw IndexError("no table row for test " + std::to_string(q));
    return rows[q - 1];
  }
  const OutcomeTriplet& cell(std::size_t q, std::size_t r) const {
    const TableRow& tr = row(q);
    if (!tr.detectable) throw IndexError("test " + std::to_string(q) + " is undetectable");
    if (r >= tr.cells.size()) throw IndexError("no variant " + std::to_string(r));
    return tr.cells[r];
  }
  bool all_detectable() const {
    return std::all_of(rows.begin(), rows.end(), [](const TableRow& r) { return r.detectable; });
  }
};

inline std::string circuit_hash(const Circuit& c) { return fnv1a_hex(serialize_circuit(c)); }
inline std::string fault_hash(const FaultSpec& spec) { return fnv1a_hex(fault_spec_to_json(spec).dump()); }

// Test(q) for every gate; undetectable gates yield std::nullopt.
inline std::vector<std::optional<HelstromTest>> build_tests(const Circuit& c, const FaultSpec& spec,
                                                            RotationConvention conv = RotationConvention::HalfAngle) {
  spec.validate(c);
  std::vector<std::optional<HelstromTest>> tests;
  for (std::size_t q = 1; q <= c.size(); ++q) {
    try {
      tests.emplace_back(build_test(c, spec, q, conv));
    } catch (const UndetectableFault&) {
      tests.emplace_back(std::nullopt);
    }
  }
  return tests;
}

inline DiagnosticTable build_table(const Circuit& c, const FaultSpec& spec,
                                   const std::vector<std::optional<HelstromTest>>& tests,
                                   RotationConvention conv = RotationConvention::HalfAngle) {
  if (tests.size() != c.size()) throw DimensionError("one test slot per gate expected");
  DiagnosticTable t;
  t.n = c.n;
  t.s = c.size();
  t.convention = conv;
  t.circuit_hash = circuit_hash(c);
  t.fault_hash = fault_hash(spec);

  std::vector<Circuit> variants;
  for (std::size_t r = 0; r <= c.size(); ++r) variants.push_back(faulty_variant(c, spec, r));

  for (std::size_t q = 1; q <= c.size(); ++q) {
    TableRow row;
    row.test = q;
    const auto& test = tests[q - 1];
    if (!test) {
      row.detectable = false;
      row.k = 1;
      row.delta = 0.5;
      row.note = "faulty and fault-free outputs coincide for every input";
    } else {
      row.delta = test->delta;
      row.k = test->k;
      for (const auto& v : variants) row.cells.push_back(outcome_probs(*test, v, conv));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline DiagnosticTable build_table(const Circuit& c, const FaultSpec& spec,
                                   RotationConvention conv = RotationConvention::HalfAngle) {
  return build_table(c, spec, build_tests(c, spec, conv), conv);
}

// ---- sampling ----

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sub-stream for test q: mt19937_64 seeded with splitmix64(seed ^ splitmix64(q)).
inline std::mt19937_64 test_stream(std::uint64_t seed, std::size_t q) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(q))));
}

// Uniform in [0, 1) from the top 53 bits.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline Outcome sample_from(const OutcomeTriplet& p, std::mt19937_64& rng) {
  const double u = unit_draw(rng) * p.sum();
  if (u < p.p0) return Outcome::Zero;
  if (u < p.p0 + p.p1) return Outcome::One;
  return p.p_unknown > 0 ? Outcome::Unknown : (p.p1 > 0 ? Outcome::One : Outcome::Zero);
}

inline Outcome sample_outcome(const HelstromTest& test, const Circuit& variant, std::mt19937_64& rng,
                              RotationConvention conv = RotationConvention::HalfAngle) {
  return sample_from(outcome_probs(test, variant, conv), rng);
}

// ---- classification ----

struct OutcomeCounts {
  std::size_t zero = 0;
  std::size_t one = 0;
  std::size_t unknown = 0;

  std::size_t total() const { return zero + one + unknown; }
  void add(Outcome o) { (o == Outcome::Zero ? zero : o == Outcome::One ? one : unknown) += 1; }
  std::size_t operator[](Outcome o) const { return o == Outcome::Zero ? zero : o == Outcome::One ? one : unknown; }
  OutcomeTriplet empirical() const {
    const double t = static_cast<double>(total());
    if (t == 0) return {};
    return {zero / t, one / t, unknown / t};
  }
};

struct DiagnosisResult {
  std::size_t verdict = 0;
  std::size_t evaluations_used = 0;
  std::vector<std::size_t> test_sequence;  // test index per round
  std::map<std::size_t, OutcomeCounts> counts;
  std::map<std::size_t, OutcomeTriplet> empirical;
  std::vector<double> scores;                            // sum of L1 per class r
  std::vector<std::vector<std::size_t>> survivor_history;  // after each round
  std::vector<std::size_t> survivors;
};

class AmbiguousDiagnosis : public Error {
 public:
  explicit AmbiguousDiagnosis(DiagnosisResult r)
      : Error("diagnosis budget exhausted with " + std::to_string(r.survivors.size()) + " classes left"),
        result(std::move(r)) {}
  DiagnosisResult result;
};

inline constexpr double kScoreTie = 1e-12;

// Aggregate L1 score per class; verdict is the argmin among candidates, ties to smaller r.
inline DiagnosisResult classify(const DiagnosticTable& table, const std::map<std::size_t, OutcomeTriplet>& observations,
                                const std::vector<std::size_t>& candidates = {}) {
  if (observations.empty()) throw Error("classify: no observations");
  DiagnosisResult res;
  res.empirical = observations;
  res.scores.assign(table.s + 1, 0.0);
  for (const auto& [q, emp] : observations)
    for (std::size_t r = 0; r <= table.s; ++r) res.scores[r] += l1_distance(emp, table.cell(q, r));

  if (candidates.empty()) {
    for (std::size_t r = 0; r <= table.s; ++r) res.survivors.push_back(r);
  } else {
    res.survivors = candidates;
  }
  // scores within kScoreTie count as equal
  std::vector<std::size_t> order = res.survivors;
  std::sort(order.begin(), order.end());
  res.verdict = order.front();
  for (std::size_t r : order)
    if (res.scores[r] < res.scores[res.verdict] - kScoreTie) res.verdict = r;
  return res;
}

// Majority-vote repetitions so that a single test misreports with probability <= epsilon.
inline std::size_t plan_shots(double delta, double epsilon) {
  if (!(epsilon > 0 && epsilon < 1)) throw Error("plan_shots: epsilon must lie in (0,1)");
  if (!(delta >= 0) || delta >= 0.5) throw UndetectableFault(0, "plan_shots: error probability " + std::to_string(delta));
  if (delta < 1e-12) return 1;
  const double gap = 0.5 - delta;
  const double n = std::ceil(std::log(1 / epsilon) / (2 * gap * gap));
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

// ---- campaigns ----

inline constexpr double kEliminationMargin = 0.25;
inline constexpr double kImpossibleOutcome = 1e-9;

struct CampaignConfig {
  std::size_t shots_per_test = 5;
  std::uint64_t rng_seed = 0;
  std::vector<std::size_t> test_order;  // empty: adaptive
  double epsilon = 0.05;
  std::size_t budget = 20;  // total circuit evaluations
  double margin = kEliminationMargin;
};

namespace detail {

inline double min_pairwise_l1(const TableRow& row, const std::vector<std::size_t>& alive) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < alive.size(); ++a)
    for (std::size_t b = a + 1; b < alive.size(); ++b)
      best = std::min(best, l1_distance(row.cells[alive[a]], row.cells[alive[b]]));
  return best;
}

inline std::size_t pick_adaptive(const DiagnosticTable& table, const std::vector<std::size_t>& alive,
                                 const std::set<std::size_t>& used) {
  // Unused tests that separate the survivors first, then reuse the best separating test.
  for (bool allow_used : {false, true}) {
    std::size_t best_q = 0;
    double best_score = 1e-9;
    for (const auto& row : table.rows) {
      if (!row.detectable || (!allow_used && used.contains(row.test))) continue;
      const double score = min_pairwise_l1(row, alive);
      if (score > best_score + 1e-12) {
        best_q = row.test;
        best_score = score;
      }
    }
    if (best_q != 0) return best_q;
  }
  for (const auto& row : table.rows)
    if (row.detectable) return row.test;
  throw UndetectableFault(0, "no detectable test to run");
}

// Drops classes that are clearly worse than the best one on test q.
inline std::vector<std::size_t> eliminate(const DiagnosticTable& table, std::size_t q, const OutcomeCounts& counts,
                                          const std::vector<std::size_t>& alive, double margin) {
  const OutcomeTriplet emp = counts.empirical();
  const TableRow& row = table.row(q);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r : alive) best = std::min(best, tv_distance(emp, row.cells[r]));

  std::vector<std::size_t> keep;
  for (std::size_t r : alive) {
    const OutcomeTriplet& p = row.cells[r];
    bool impossible = false;
    for (Outcome o : {Outcome::Zero, Outcome::One, Outcome::Unknown})
      if (counts[o] > 0 && p[o] <= kImpossibleOutcome) impossible = true;
    if (!impossible && tv_distance(emp, p) <= best + margin) keep.push_back(r);
  }
  return keep.empty() ? alive : keep;
}

}  // namespace detail

// Runs Test(q) repeatedly on the circuit under test. With an explicit order the verdict
// is classify's argmin over all classes; adaptive mode eliminates classes until one is left.
inline DiagnosisResult run_campaign(const Circuit& under_test, const DiagnosticTable& table,
                                    const std::vector<std::optional<HelstromTest>>& tests, const CampaignConfig& cfg) {
  if (cfg.shots_per_test < 1) throw Error("shots_per_test must be at least 1");
  if (cfg.budget < 1) throw Error("budget must be at least 1");
  if (under_test.n != table.n) throw DimensionError("circuit under test has a different qubit count");
  if (tests.size() != table.s) throw DimensionError("one test slot per table row expected");
  if (std::none_of(tests.begin(), tests.end(), [](const auto& t) { return t.has_value(); }))
    throw UndetectableFault(0, "no detectable test to run");
  for (std::size_t q : cfg.test_order)
    if (q < 1 || q > table.s || !tests[q - 1]) throw IndexError("test " + std::to_string(q) + " cannot be run");

  const bool adaptive = cfg.test_order.empty();
  std::map<std::size_t, std::mt19937_64> streams;
  std::map<std::size_t, OutcomeTriplet> exact;
  std::map<std::size_t, OutcomeCounts> counts;
  std::set<std::size_t> used;
  std::vector<std::size_t> alive;
  for (std::size_t r = 0; r <= table.s; ++r) alive.push_back(r);

  DiagnosisResult res;
  std::size_t round = 0;
  while (res.evaluations_used < cfg.budget) {
    if (adaptive && alive.size() == 1) break;
    if (!adaptive && round == cfg.test_order.size()) break;
    const std::size_t q = adaptive ? detail::pick_adaptive(table, alive, used) : cfg.test_order[round];
    ++round;
    used.insert(q);
    if (!streams.contains(q)) {
      streams.emplace(q, test_stream(cfg.rng_seed, q));
      exact[q] = outcome_probs(*tests[q - 1], under_test, table.convention);
    }
    const std::size_t shots = std::min(cfg.shots_per_test, cfg.budget - res.evaluations_used);
    for (std::size_t j = 0; j < shots; ++j) counts[q].add(sample_from(exact[q], streams.at(q)));
    res.evaluations_used += shots;
    res.test_sequence.push_back(q);
    if (adaptive) alive = detail::eliminate(table, q, counts[q], alive, cfg.margin);
    res.survivor_history.push_back(alive);
  }

  std::map<std::size_t, OutcomeTriplet> observed;
  for (const auto& [q, c] : counts) observed[q] = c.empirical();
  DiagnosisResult scored = classify(table, observed, adaptive ? alive : std::vector<std::size_t>{});
  res.verdict = scored.verdict;
  res.scores = std::move(scored.scores);
  res.survivors = std::move(scored.survivors);
  res.empirical = std::move(observed);
  res.counts = std::move(counts);
  if (adaptive && res.survivors.size() > 1) throw AmbiguousDiagnosis(std::move(res));
  return res;
}

}  // namespace qfd
