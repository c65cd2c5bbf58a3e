#include "ram/render.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ram {

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string activated_cell(const ScenarioRow& row) {
  std::string cell;
  for (std::size_t i = 0; i < row.scope.size(); ++i)
    if (phase_at(row.initial_state, i) == Phase::Active) cell += row.scope[i];
  return cell.empty() ? "0" : cell;
}

bool state_has_mishap(StateCode s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (phase_at(s, i) == Phase::Mishap) return true;
  return false;
}

}  // namespace

std::string render_risk_structure(const RiskStructure& rs, const RenderOptions& opts) {
  if (opts.format != RenderFormat::Dot)
    throw std::invalid_argument("risk structures render as DOT only");

  std::ostringstream os;
  os << "digraph risk {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle];\n";
  for (StateCode s : rs.states) {
    os << "  " << dot_quote(state_text(s, rs.scope));
    std::string attrs;
    if (s == rs.initial) attrs += "shape=doublecircle";
    if (state_has_mishap(s, rs.scope.size())) {
      if (!attrs.empty()) attrs += ", ";
      attrs += "style=dotted";
    }
    if (!attrs.empty()) os << " [" << attrs << "]";
    os << ";\n";
  }
  for (const auto& t : rs.transitions) {
    const ActionLabel& a = rs.actions[t.action];
    if (a.offline && !opts.include_offline) continue;
    os << "  " << dot_quote(state_text(rs.states[t.source], rs.scope)) << " -> "
       << dot_quote(state_text(rs.states[t.target], rs.scope));
    os << " [label=" << dot_quote(label_text(a));
    if (opts.color_edges) os << ", color=" << (a.endangerment() ? "red" : "darkgreen");
    if (a.offline) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string render_situation_graph(const SituationGraph& g) {
  std::ostringstream os;
  os << "digraph process {\n";
  os << "  rankdir=LR;\n";
  os << "  " << dot_quote("__initial") << " [shape=point, color=gray];\n";
  for (const auto& n : g.nodes) os << "  " << dot_quote(n) << ";\n";
  for (const auto& n : g.initials)
    os << "  " << dot_quote("__initial") << " -> " << dot_quote(n) << " [color=gray];\n";
  for (const auto& [a, b] : g.edges)
    os << "  " << dot_quote(a) << " -> " << dot_quote(b) << ";\n";
  os << "}\n";
  return os.str();
}

std::string render_scenario(const Scenario& s, const RenderOptions& opts) {
  if (opts.format == RenderFormat::Csv) {
    std::ostringstream os;
    os << "Step,Situation,#CFs,InitialState,#States,#Trans\n";
    for (const auto& r : s.rows) {
      os << r.step << "," << csv_field(r.situation) << "," << r.cf_count << ","
         << csv_field(activated_cell(r)) << "," << r.state_count << "," << r.transition_count
         << "\n";
    }
    return os.str();
  }
  if (opts.format != RenderFormat::PlainTable)
    throw std::invalid_argument("scenarios render as Csv or PlainTable");

  const std::vector<std::string> header = {"Step", "Driving Situation", "#CFs",
                                           "Initial State", "#States", "#Trans."};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : s.rows) {
    rows.push_back({std::to_string(r.step), r.situation, std::to_string(r.cf_count),
                    activated_cell(r), std::to_string(r.state_count),
                    std::to_string(r.transition_count)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size()) os << std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << "\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return os.str();
}

std::string render_strategy_report(const RiskStructure& rs, const StrategyReport& rep) {
  std::ostringstream os;
  auto line = [&](const std::string& kind, const std::string& state, const std::string& detail) {
    nlohmann::json j;
    j["kind"] = kind;
    j["situation"] = rs.situation;
    j["state"] = state;
    j["detail"] = detail;
    os << j.dump() << "\n";
  };

  line("summary", state_text(rs.initial, rs.scope),
       "coverable=" + std::to_string(rep.coverable.size()) +
           " stranded=" + std::to_string(rep.stranded.size()) +
           " offRepairOnly=" + std::to_string(rep.off_repair_only.size()) +
           " cycles=" + std::to_string(rep.cycles.size()));
  for (StateCode s : rep.stranded)
    line("stranded", state_text(s, rs.scope), "no mitigation path back to 0");
  for (StateCode s : rep.off_repair_only)
    line("offRepairOnly", state_text(s, rs.scope), "reaches 0 only through off-line mitigation");
  for (const auto& cyc : rep.cycles) {
    std::string detail;
    for (StateCode s : cyc) {
      if (!detail.empty()) detail += " -> ";
      detail += state_text(s, rs.scope);
    }
    if (!cyc.empty()) detail += " -> " + state_text(cyc.front(), rs.scope);
    line("cycle", cyc.empty() ? "0" : state_text(cyc.front(), rs.scope), detail);
  }
  if (rep.cycles_truncated)
    line("cyclesTruncated", "", "cycle enumeration stopped at the configured cap");
  return os.str();
}

}  // namespace ram
