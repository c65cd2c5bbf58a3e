#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ram/model.hpp"

namespace ram {

/// A risk state packs one phase per in-scope factor, two bits each, in the
/// factor's scope position. The all-inactive state is code 0. At most 32
/// factors per situation.
using StateCode = std::uint64_t;

constexpr Phase phase_at(StateCode s, std::size_t i) {
  return static_cast<Phase>((s >> (2 * i)) & 3u);
}
constexpr StateCode with_phase(StateCode s, std::size_t i, Phase p) {
  return (s & ~(StateCode{3} << (2 * i))) | (StateCode{static_cast<std::uint8_t>(p)} << (2 * i));
}

/// Count of factors in phase Active or Mishap (the risk-increasing phases).
int raised_count(StateCode s, std::size_t n_factors);

/// Explicit labeled transition system over the risk states of one situation.
/// States, actions and transitions are kept in canonical sorted order, so
/// two structures over the same model compare (and serialize) identically
/// regardless of how they were built.
struct RiskStructure {
  std::string situation;
  std::vector<std::string> scope;  // factor ids, model declaration order
  StateCode initial = 0;
  std::vector<StateCode> states;   // sorted ascending
  std::vector<ActionLabel> actions;

  struct Transition {
    std::uint32_t source = 0;  // index into states
    std::uint32_t action = 0;  // index into actions
    std::uint32_t target = 0;  // index into states
    auto operator<=>(const Transition&) const = default;
  };
  std::vector<Transition> transitions;  // sorted by (source, action, target)

  bool has_state(StateCode s) const;
  std::size_t index_of(StateCode s) const;  // throws std::out_of_range
  std::size_t scope_index(const std::string& factor) const;  // throws std::out_of_range

  bool operator==(const RiskStructure&) const = default;
};

/// Parse "A,~B,_C" (A active, B mitigated, C mishap, rest inactive) against
/// a scope; "0" or "" is the all-inactive state. Throws std::invalid_argument.
StateCode parse_state(const std::string& spec, std::span<const std::string> scope);

/// "0" for all-inactive, otherwise the non-inactive factors in scope order:
/// active as "W", mitigated as "~W", mishap as "_W".
std::string state_text(StateCode s, std::span<const std::string> scope);

/// Phase model of a single factor as a risk structure over scope {factor}.
RiskStructure expand_phase_model(const CausalFactor& factor);

enum class ComposeMode { Auto, Serial, Parallel };

/// Constrained interleaving product of the phase models of a situation's
/// effective factors, restricted to states reachable from the all-inactive
/// state. Serial and parallel modes produce identical structures; Auto
/// picks based on scope size. Throws std::out_of_range for unknown
/// situations and std::invalid_argument for scopes over 32 factors.
RiskStructure compose_situation(const CausalFactorModel& model, const std::string& situation,
                                ComposeMode mode = ComposeMode::Auto);

/// Same, but explored from an arbitrary initial state (used for scenario
/// statistics, where execution jumps into a sampled state).
RiskStructure compose_from(const CausalFactorModel& model, const std::string& situation,
                           StateCode initial, ComposeMode mode = ComposeMode::Auto);

/// Restriction of `rs` to endangerment-labeled transitions and the states
/// reachable from the initial state through them.
RiskStructure endangerment_subgraph(const RiskStructure& rs);

struct StructureStats {
  std::size_t state_count = 0;
  std::size_t transition_count = 0;
  std::size_t endangerment_count = 0;
  std::size_t mitigation_count = 0;
  std::size_t mishap_state_count = 0;

  bool operator==(const StructureStats&) const = default;
};

StructureStats stats(const RiskStructure& rs);

namespace detail {

/// Successor generation shared by the serial and OpenMP builders: per-factor
/// phase-model edges gated and propagated by the constraint semantics.
///
/// Activation (direct or re-endangering) of factor `a` is enabled when all
/// its `requires` prerequisites are Active and no active factor denies or
/// excludes it. Its effect is computed by a deterministic closure: the
/// `causes` relation propagates from newly activated factors to inactive
/// targets whose gates pass against the evolving assignment (scanned in
/// canonical order, in rounds, to a fixpoint); afterwards every factor
/// excluded by a newly activated one is reset to Inactive.
class Expander {
 public:
  Expander(const CausalFactorModel& model, const std::string& situation);

  struct Succ {
    std::uint32_t action;  // index into labels()
    StateCode target;
  };

  void successors(StateCode s, std::vector<Succ>& out) const;

  const std::vector<ActionLabel>& labels() const { return labels_; }
  const std::vector<std::string>& scope() const { return scope_; }
  const std::string& situation() const { return situation_; }
  StateCode apply_activation(StateCode s, std::size_t factor) const;  // closure incl. exclusion
  bool activation_enabled(StateCode s, std::size_t factor) const;

 private:
  std::string situation_;
  std::vector<std::string> scope_;
  std::vector<const CausalFactor*> factors_;
  // per factor: action indices (UINT32_MAX when the edge does not exist)
  struct FactorActions {
    std::uint32_t activate, mishap, start, end, complete;
  };
  std::vector<FactorActions> factor_actions_;
  std::vector<ActionLabel> labels_;
  std::vector<std::vector<std::size_t>> requires_;        // per factor: prerequisites
  std::vector<std::vector<std::size_t>> blocked_by_;      // per factor: deniers + excluders
  std::vector<std::pair<std::size_t, std::size_t>> causes_;    // canonical order
  std::vector<std::vector<std::size_t>> excludes_;        // per factor: targets it excludes
};

struct RawTransition {
  StateCode source;
  std::uint32_t action;
  StateCode target;
};

/// Assembles the canonical structure from exploration output: sorts states,
/// remaps transitions to indices, drops unused action labels.
RiskStructure canonicalize(const Expander& ex, StateCode initial, std::vector<StateCode> states,
                           std::vector<RawTransition> transitions);

RiskStructure compose_serial(const Expander& ex, StateCode initial);
RiskStructure compose_parallel(const Expander& ex, StateCode initial);

}  // namespace detail

}  // namespace ram
