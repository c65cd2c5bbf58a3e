#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ram/risk_space.hpp"

namespace ram {

struct MitigationPlan {
  StateCode from = 0;
  std::vector<ActionLabel> actions;  // run-time mitigations only
  StateCode to = 0;

  bool operator==(const MitigationPlan&) const = default;
};

/// Shortest run-time, mitigation-only path from `state` to the all-inactive
/// state; among equally short plans the lexicographically least action
/// sequence (by factor id, then action kind) is returned. nullopt when no
/// such path exists. Throws std::out_of_range when state is not in rs.
std::optional<MitigationPlan> plan_from(const RiskStructure& rs, StateCode state);

/// Partition of the state space by mitigability, plus
/// mitigation-endangerment cycles (simple cycles using both edge colors),
/// enumeration capped at max_cycles.
struct StrategyReport {
  std::vector<StateCode> coverable;        // run-time mitigation path to 0 (0 itself included)
  std::vector<StateCode> stranded;         // no mitigation path to 0 at all
  std::vector<StateCode> off_repair_only;  // reaches 0 only through off-line mitigations
  std::vector<std::vector<StateCode>> cycles;
  bool cycles_truncated = false;
};

StrategyReport strategy_report(const RiskStructure& rs, std::size_t max_cycles = 100);

/// Risk value of a state: weight of every Active factor plus twice the
/// weight of every Mishap factor. Factors missing from the map weigh 1.
double risk_value(const RiskStructure& rs, StateCode state,
                  const std::map<std::string, double>& weights);

/// States whose risk value exceeds the budget (a state is b-safe iff not
/// returned). Throws std::invalid_argument for negative weights or budget.
std::vector<StateCode> check_budget(const RiskStructure& rs,
                                    const std::map<std::string, double>& weights, double budget);

}  // namespace ram
