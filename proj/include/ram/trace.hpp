#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ram/model.hpp"
#include "ram/risk_space.hpp"

namespace ram {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Temporal formulas over phase atoms, evaluated on finite state traces.
struct Formula {
  enum class Kind : std::uint8_t {
    AtomPhase, Not, And, Or, Implies, Always, Eventually, Until, WeakUntil, Once
  };
  Kind kind = Kind::AtomPhase;
  std::string factor;              // AtomPhase
  Phase phase = Phase::Inactive;   // AtomPhase
  FormulaPtr left, right;          // unary operators use left
};

FormulaPtr atom_phase(std::string factor, Phase p);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_always(FormulaPtr a);
FormulaPtr f_eventually(FormulaPtr a);
FormulaPtr f_until(FormulaPtr a, FormulaPtr b);
FormulaPtr f_weak_until(FormulaPtr a, FormulaPtr b);
FormulaPtr f_once(FormulaPtr a);

/// Untimed finite-trace translation of a constraint into an invariant the
/// composed structure guarantees; the atom active(x) reads phase Active,
/// inactive(x) phase Inactive.
///   requires(a,b): G(active(a) -> O active(b))
///   causes(a,b):   G(active(a) -> O(active(a) & !inactive(b)))
///   denies(a,b):   G(active(b) -> O(active(b) & !active(a)))
///   excludes(a,b): G(active(a) -> O(active(a) & inactive(b)))
FormulaPtr constraint_to_formula(const Constraint& c);

/// Conjunction of all constraint translations; nullptr for an empty set.
FormulaPtr constraints_to_formula(std::span<const Constraint> cs);

/// The strict precedence pattern "b globally precedes a":
/// F active(a) -> (!active(a) U (active(b) & !active(a))).
FormulaPtr globally_precedes(const std::string& b, const std::string& a);

std::string formula_to_string(const FormulaPtr& f);

/// CLI formula syntax: G F O U W ! & | -> and atoms active(X), inactive(X),
/// mitigated(X), mishap(X). Returns nullptr and sets `error` on bad input.
FormulaPtr parse_formula(std::string_view text, std::string& error);

struct TraceVerdict {
  bool holds = true;
  std::optional<std::size_t> witness_index;  // engaged iff !holds

  bool operator==(const TraceVerdict&) const = default;
};

/// Finite-trace evaluation at position 0. Always/Eventually/Until/WeakUntil
/// range over the remaining suffix; at the final position Eventually(f)
/// holds iff f holds there, Until keeps its obligation (strong) and
/// WeakUntil discharges it. The witness of a failed Always is the least
/// position violating its body (for conjunctions, the least such witness of
/// a failing conjunct). Throws std::invalid_argument for an empty trace or
/// atoms naming factors outside the scope.
TraceVerdict check_trace(const FormulaPtr& f, std::span<const StateCode> trace,
                         std::span<const std::string> scope);

/// Seeded random walks from the initial state (at most max_len states per
/// walk, fewer only at a deadlock), each checked against f. Walk i draws
/// from an independent stream derived from (seed, i), so the result is a
/// pure function of the arguments and walks may be checked in parallel.
std::vector<TraceVerdict> check_structure(const RiskStructure& rs, const FormulaPtr& f, int walks,
                                          int max_len, std::uint64_t seed);

/// The walk itself, for reporting and replay.
std::vector<StateCode> random_walk(const RiskStructure& rs, int max_len, std::uint64_t walk_seed);

}  // namespace ram
