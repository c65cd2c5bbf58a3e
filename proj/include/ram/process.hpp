#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ram/model.hpp"
#include "ram/risk_space.hpp"

namespace ram {

/// Successor relation of the driving process: nodes are the situations of
/// the root's unfolding, an edge (s, t) means t can immediately follow s in
/// some scenario. Aspects contribute factor sets, not nodes.
struct SituationGraph {
  std::vector<std::string> nodes;                          // sorted
  std::vector<std::pair<std::string, std::string>> edges;  // sorted
  std::vector<std::string> initials;                       // possible first situations

  bool has_node(const std::string& s) const;
  bool has_edge(const std::string& a, const std::string& b) const;
  std::vector<std::string> successors(const std::string& s) const;  // sorted
};

/// First/last/follow analysis over the guarded-recursive process
/// definitions; no trace enumeration. Throws std::invalid_argument when the
/// model has no root process or recursion is unguarded.
SituationGraph successor_graph(const CausalFactorModel& model);

struct ScenarioRow {
  int step = 1;  // 1-based
  std::string situation;
  int cf_count = 0;
  std::vector<std::string> scope;  // effective factors, declaration order
  StateCode initial_state = 0;
  std::size_t state_count = 0;
  std::size_t transition_count = 0;

  bool operator==(const ScenarioRow&) const = default;
};

struct Scenario {
  std::vector<ScenarioRow> rows;
  std::uint64_t seed = 0;

  bool operator==(const Scenario&) const = default;
};

/// Symbolic execution: a seeded random walk over the successor graph. Each
/// step samples an initial risk state (every in-scope factor activated with
/// probability p_activate, then closed under causes/excludes and re-checked
/// against requires, resampling up to 64 times before falling back to 0)
/// and reports the size of the sub-space reachable from it. Pure function
/// of (model, start, steps, seed, p_activate). Truncates early only when a
/// situation has no successors. Throws std::invalid_argument for steps < 1
/// or a start situation that is not a node of the graph.
Scenario sample_scenario(const CausalFactorModel& model, const std::string& start, int steps,
                         std::uint64_t seed, double p_activate = 0.5);

/// Phase translation across a situation change: factors shared by both
/// scopes keep their phase, target-only factors start Inactive, source-only
/// factors are dropped.
StateCode translate_state(StateCode state, std::span<const std::string> from_scope,
                          std::span<const std::string> to_scope);

/// For every successor of `situation`, the risk state the loop jumps into
/// when leaving `situation` in `state`. Sorted by situation id.
std::vector<std::pair<std::string, StateCode>> jump_targets(const CausalFactorModel& model,
                                                            const std::string& situation,
                                                            StateCode state);

}  // namespace ram
