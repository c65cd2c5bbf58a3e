#pragma once

#include <string>

#include "ram/planner.hpp"
#include "ram/process.hpp"
#include "ram/risk_space.hpp"

namespace ram {

enum class RenderFormat : std::uint8_t { Dot, Csv, JsonLines, PlainTable };

struct RenderOptions {
  RenderFormat format = RenderFormat::Dot;
  bool color_edges = true;     // endangerments red, mitigations green
  bool include_offline = true; // off-line edges are drawn dashed when included
};

/// DOT text of a risk structure; node and edge order is sorted and
/// byte-stable. Throws std::invalid_argument for unsupported formats.
std::string render_risk_structure(const RiskStructure& rs, const RenderOptions& opts);

/// DOT text of the situation successor graph (anonymous initial dot node
/// pointing at the possible first situations).
std::string render_situation_graph(const SituationGraph& g);

/// Scenario table, Csv or PlainTable. The initial-state cell lists the
/// activated factors in declaration order, "0" when none.
std::string render_scenario(const Scenario& s, const RenderOptions& opts);

/// JSON-lines report: one object per finding with fields kind, situation,
/// state, detail.
std::string render_strategy_report(const RiskStructure& rs, const StrategyReport& rep);

}  // namespace ram
