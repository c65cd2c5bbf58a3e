#include "ram/planner.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ram {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

bool runtime_mitigation(const RiskStructure& rs, const RiskStructure::Transition& t) {
  const ActionLabel& a = rs.actions[t.action];
  return a.mitigation() && !a.offline;
}

bool any_mitigation(const RiskStructure& rs, const RiskStructure::Transition& t) {
  return rs.actions[t.action].mitigation();
}

// Distance of every state to the all-inactive state over the given edge
// filter, by backward BFS.
template <typename Filter>
std::vector<std::size_t> distance_to_zero(const RiskStructure& rs, Filter keep) {
  std::vector<std::size_t> dist(rs.states.size(), kUnreached);
  if (!rs.has_state(0)) return dist;

  std::vector<std::vector<std::uint32_t>> rev(rs.states.size());
  for (const auto& t : rs.transitions)
    if (keep(rs, t)) rev[t.target].push_back(t.source);

  std::vector<std::uint32_t> queue;
  std::size_t zero = rs.index_of(0);
  dist[zero] = 0;
  queue.push_back(static_cast<std::uint32_t>(zero));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::uint32_t v = queue[head];
    for (std::uint32_t u : rev[v]) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

}  // namespace

std::optional<MitigationPlan> plan_from(const RiskStructure& rs, StateCode state) {
  std::size_t start = rs.index_of(state);  // throws when absent
  auto dist = distance_to_zero(rs, runtime_mitigation);
  if (dist[start] == kUnreached) return std::nullopt;

  MitigationPlan plan;
  plan.from = state;
  plan.to = 0;
  std::size_t cur = start;
  while (dist[cur] > 0) {
    // Among shortest continuations pick the least label; one (factor, kind)
    // pair determines at most one edge per state, so this is unambiguous.
    const RiskStructure::Transition* best = nullptr;
    for (const auto& t : rs.transitions) {
      if (t.source != cur || !runtime_mitigation(rs, t)) continue;
      if (dist[t.target] != dist[cur] - 1) continue;
      if (!best || rs.actions[t.action] < rs.actions[best->action]) best = &t;
    }
    if (!best) return std::nullopt;  // unreachable by construction
    plan.actions.push_back(rs.actions[best->action]);
    cur = best->target;
  }
  return plan;
}

StrategyReport strategy_report(const RiskStructure& rs, std::size_t max_cycles) {
  StrategyReport rep;
  auto dist_runtime = distance_to_zero(rs, runtime_mitigation);
  auto dist_any = distance_to_zero(rs, any_mitigation);

  for (std::size_t i = 0; i < rs.states.size(); ++i) {
    if (dist_runtime[i] != kUnreached)
      rep.coverable.push_back(rs.states[i]);
    else if (dist_any[i] != kUnreached)
      rep.off_repair_only.push_back(rs.states[i]);
    else
      rep.stranded.push_back(rs.states[i]);
  }

  // Simple cycles that mix at least one mitigation and one endangerment
  // edge, enumerated with the smallest-state-first convention; capped.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(rs.states.size());
  for (const auto& t : rs.transitions) adj[t.source].push_back({t.target, t.action});

  struct Dfs {
    const RiskStructure& rs;
    const std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>& adj;
    StrategyReport& rep;
    std::size_t max_cycles;
    std::size_t budget = 2'000'000;  // exploration cap, keeps dense spaces bounded
    std::vector<char> on_path;
    std::vector<std::uint32_t> path;
    int mit_edges = 0, end_edges = 0;
    std::uint32_t root = 0;

    bool run(std::uint32_t v) {  // returns false when out of budget/cap
      if (budget-- == 0) return false;
      on_path[v] = 1;
      path.push_back(v);
      for (const auto& [to, action] : adj[v]) {
        if (to < root) continue;  // cycles are rooted at their least state
        bool mit = rs.actions[action].mitigation();
        if (to == root) {
          if (mit_edges + mit > 0 && end_edges + !mit > 0) {
            std::vector<StateCode> cyc;
            for (std::uint32_t u : path) cyc.push_back(rs.states[u]);
            rep.cycles.push_back(std::move(cyc));
            if (rep.cycles.size() >= max_cycles) {
              rep.cycles_truncated = true;
              return false;
            }
          }
          continue;
        }
        if (on_path[to]) continue;
        mit_edges += mit;
        end_edges += !mit;
        bool ok = run(to);
        mit_edges -= mit;
        end_edges -= !mit;
        if (!ok) return false;
      }
      on_path[v] = 0;
      path.pop_back();
      return true;
    }
  };

  Dfs dfs{rs, adj, rep, max_cycles, 2'000'000, std::vector<char>(rs.states.size(), 0), {}, 0, 0, 0};
  for (std::uint32_t r = 0; r < rs.states.size() && !rep.cycles_truncated; ++r) {
    dfs.root = r;
    dfs.mit_edges = dfs.end_edges = 0;
    dfs.path.clear();
    std::fill(dfs.on_path.begin(), dfs.on_path.end(), 0);
    if (!dfs.run(r)) {
      if (!rep.cycles_truncated) rep.cycles_truncated = true;  // budget exhausted
      break;
    }
  }
  return rep;
}

double risk_value(const RiskStructure& rs, StateCode state,
                  const std::map<std::string, double>& weights) {
  double v = 0;
  for (std::size_t i = 0; i < rs.scope.size(); ++i) {
    auto it = weights.find(rs.scope[i]);
    double w = it != weights.end() ? it->second : 1.0;
    Phase p = phase_at(state, i);
    if (p == Phase::Active) v += w;
    else if (p == Phase::Mishap) v += 2 * w;
  }
  return v;
}

std::vector<StateCode> check_budget(const RiskStructure& rs,
                                    const std::map<std::string, double>& weights, double budget) {
  if (budget < 0) throw std::invalid_argument("risk budget must be non-negative");
  for (const auto& [id, w] : weights)
    if (w < 0) throw std::invalid_argument("risk weight for " + id + " must be non-negative");

  std::vector<StateCode> out;
  for (StateCode s : rs.states)
    if (risk_value(rs, s, weights) > budget) out.push_back(s);
  return out;
}

}  // namespace ram
