#include "ram/process.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "expr_analysis.hpp"
#include "ram/rng.hpp"

namespace ram {

bool SituationGraph::has_node(const std::string& s) const {
  return std::binary_search(nodes.begin(), nodes.end(), s);
}

bool SituationGraph::has_edge(const std::string& a, const std::string& b) const {
  return std::binary_search(edges.begin(), edges.end(), std::pair(a, b));
}

std::vector<std::string> SituationGraph::successors(const std::string& s) const {
  std::vector<std::string> out;
  auto lo = std::lower_bound(edges.begin(), edges.end(), std::pair(s, std::string()));
  for (auto it = lo; it != edges.end() && it->first == s; ++it) out.push_back(it->second);
  return out;
}

// -- successor graph ------------------------------------------------------------

namespace {

using StringSet = std::set<std::string>;

struct Fln {
  StringSet first, last;
  bool nullable = false;

  bool operator==(const Fln&) const = default;
};

// First/last/nullable with Par treated as superimposition: the aspect side
// is invisible to the trace skeleton.
struct GraphBuilder {
  const CausalFactorModel& model;
  const detail::ExprAnalysis& an;
  std::map<std::string, Fln> table;  // per process name, grown to a fixpoint

  Fln fln(const ProcessPtr& e) const {
    if (!e) return {{}, {}, true};
    switch (e->kind) {
      case ProcessExpr::Kind::Atom: return {{e->name}, {e->name}, false};
      case ProcessExpr::Kind::Ref: {
        auto it = table.find(e->name);
        return it != table.end() ? it->second : Fln{};
      }
      case ProcessExpr::Kind::Star: {
        Fln b = fln(e->left);
        b.nullable = true;
        return b;
      }
      case ProcessExpr::Kind::Seq: {
        Fln l = fln(e->left), r = fln(e->right);
        Fln out;
        out.first = l.first;
        if (l.nullable) out.first.insert(r.first.begin(), r.first.end());
        out.last = r.last;
        if (r.nullable) out.last.insert(l.last.begin(), l.last.end());
        out.nullable = l.nullable && r.nullable;
        return out;
      }
      case ProcessExpr::Kind::Choice: {
        Fln l = fln(e->left), r = fln(e->right);
        Fln out;
        out.first = l.first;
        out.first.insert(r.first.begin(), r.first.end());
        out.last = l.last;
        out.last.insert(r.last.begin(), r.last.end());
        out.nullable = l.nullable || r.nullable;
        return out;
      }
      case ProcessExpr::Kind::Par: {
        bool la = an.is_aspect_tree(e->left), ra = an.is_aspect_tree(e->right);
        if (la && ra) return {{}, {}, true};  // pure aspect tree: invisible
        if (la) return fln(e->right);
        if (ra) return fln(e->left);
        throw std::invalid_argument(
            "parallel composition of two non-aspect processes has no successor semantics");
      }
    }
    return {};
  }

  void edges_of(const ProcessPtr& e, std::set<std::pair<std::string, std::string>>& out) const {
    if (!e) return;
    switch (e->kind) {
      case ProcessExpr::Kind::Atom:
      case ProcessExpr::Kind::Ref:
        return;
      case ProcessExpr::Kind::Star: {
        edges_of(e->left, out);
        Fln b = fln(e->left);
        for (const auto& a : b.last)
          for (const auto& f : b.first) out.insert({a, f});
        return;
      }
      case ProcessExpr::Kind::Seq: {
        edges_of(e->left, out);
        edges_of(e->right, out);
        Fln l = fln(e->left), r = fln(e->right);
        for (const auto& a : l.last)
          for (const auto& f : r.first) out.insert({a, f});
        return;
      }
      case ProcessExpr::Kind::Choice:
        edges_of(e->left, out);
        edges_of(e->right, out);
        return;
      case ProcessExpr::Kind::Par: {
        bool la = an.is_aspect_tree(e->left), ra = an.is_aspect_tree(e->right);
        if (la && ra) return;
        edges_of(la ? e->right : e->left, out);
        return;
      }
    }
  }

  void atoms_of(const ProcessPtr& e, StringSet& out) const {
    if (!e) return;
    switch (e->kind) {
      case ProcessExpr::Kind::Atom: out.insert(e->name); return;
      case ProcessExpr::Kind::Ref: return;
      case ProcessExpr::Kind::Star: atoms_of(e->left, out); return;
      case ProcessExpr::Kind::Par: {
        bool la = an.is_aspect_tree(e->left), ra = an.is_aspect_tree(e->right);
        if (la && ra) return;
        atoms_of(la ? e->right : e->left, out);
        return;
      }
      default:
        atoms_of(e->left, out);
        atoms_of(e->right, out);
    }
  }

  void refs_of(const ProcessPtr& e, StringSet& out) const {
    if (!e) return;
    if (e->kind == ProcessExpr::Kind::Ref) {
      out.insert(e->name);
      return;
    }
    refs_of(e->left, out);
    refs_of(e->right, out);
  }
};

}  // namespace

SituationGraph successor_graph(const CausalFactorModel& model) {
  if (model.root.empty()) throw std::invalid_argument("model declares no root process");
  auto root_it = model.processes.find(model.root);
  if (root_it == model.processes.end())
    throw std::invalid_argument("root process " + model.root + " is not declared");

  auto an = detail::analyze(model);
  if (auto bad = detail::unguarded_names(model, an); !bad.empty())
    throw std::invalid_argument("unguarded recursion through process " + bad.front());

  GraphBuilder gb{model, an, {}};
  for (const auto& [name, _] : model.processes) gb.table[name] = Fln{};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [name, body] : model.processes) {
      Fln next = gb.fln(body);
      if (!(next == gb.table[name])) {
        gb.table[name] = std::move(next);
        changed = true;
      }
    }
  }

  // Definitions reachable from the root contribute their nodes and edges.
  StringSet reachable{model.root};
  std::vector<std::string> stack{model.root};
  while (!stack.empty()) {
    auto name = stack.back();
    stack.pop_back();
    auto it = model.processes.find(name);
    if (it == model.processes.end()) continue;
    StringSet refs;
    gb.refs_of(it->second, refs);
    for (const auto& r : refs)
      if (reachable.insert(r).second) stack.push_back(r);
  }

  StringSet nodes;
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& name : reachable) {
    auto it = model.processes.find(name);
    if (it == model.processes.end()) continue;
    gb.atoms_of(it->second, nodes);
    gb.edges_of(it->second, edges);
  }

  SituationGraph g;
  g.nodes.assign(nodes.begin(), nodes.end());
  g.edges.assign(edges.begin(), edges.end());
  Fln root_fln = gb.fln(root_it->second);
  g.initials.assign(root_fln.first.begin(), root_fln.first.end());
  return g;
}

// -- scenarios --------------------------------------------------------------------

namespace {

// The sampled assignment is closed exactly in this order: causes fixpoint,
// excludes deactivation, requires re-check (resample on violation).
StateCode close_sampled_state(StateCode s, std::span<const std::string> scope,
                              const std::vector<Constraint>& constraints, bool& requires_ok) {
  auto idx = [&](const std::string& id) -> int {
    for (std::size_t i = 0; i < scope.size(); ++i)
      if (scope[i] == id) return static_cast<int>(i);
    return -1;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : constraints) {
      if (c.kind != ConstraintKind::Causes) continue;
      int l = idx(c.left), r = idx(c.right);
      if (l < 0 || r < 0) continue;
      if (phase_at(s, l) == Phase::Active && phase_at(s, r) == Phase::Inactive) {
        s = with_phase(s, r, Phase::Active);
        changed = true;
      }
    }
  }
  for (const auto& c : constraints) {
    if (c.kind != ConstraintKind::Excludes) continue;
    int l = idx(c.left), r = idx(c.right);
    if (l < 0 || r < 0) continue;
    if (phase_at(s, l) == Phase::Active && phase_at(s, r) != Phase::Inactive)
      s = with_phase(s, r, Phase::Inactive);
  }
  requires_ok = true;
  for (const auto& c : constraints) {
    if (c.kind != ConstraintKind::Requires) continue;
    int l = idx(c.left), r = idx(c.right);
    if (l < 0 || r < 0) continue;
    if (phase_at(s, l) == Phase::Active && phase_at(s, r) != Phase::Active) requires_ok = false;
  }
  return s;
}

StateCode sample_initial_state(const CausalFactorModel& model, const std::string& situation,
                               std::span<const std::string> scope, Rng& rng, double p_activate) {
  std::vector<Constraint> cs = model.global_constraints;
  if (const Situation* sit = model.situation(situation))
    cs.insert(cs.end(), sit->constraints.begin(), sit->constraints.end());
  std::sort(cs.begin(), cs.end());

  for (int attempt = 0; attempt < 64; ++attempt) {
    StateCode s = 0;
    for (std::size_t i = 0; i < scope.size(); ++i)
      if (rng.unit() < p_activate) s = with_phase(s, i, Phase::Active);
    bool requires_ok = false;
    s = close_sampled_state(s, scope, cs, requires_ok);
    if (requires_ok) return s;
  }
  return 0;
}

}  // namespace

Scenario sample_scenario(const CausalFactorModel& model, const std::string& start, int steps,
                         std::uint64_t seed, double p_activate) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  SituationGraph graph = successor_graph(model);
  if (!graph.has_node(start))
    throw std::invalid_argument("situation " + start + " is not a node of the process graph");

  Scenario sc;
  sc.seed = seed;
  Rng rng(seed);
  std::string cur = start;
  for (int step = 1; step <= steps; ++step) {
    ScenarioRow row;
    row.step = step;
    row.situation = cur;
    row.scope = effective_factors(model, cur);
    row.cf_count = static_cast<int>(row.scope.size());
    row.initial_state = sample_initial_state(model, cur, row.scope, rng, p_activate);
    RiskStructure sub = compose_from(model, cur, row.initial_state);
    StructureStats st = stats(sub);
    row.state_count = st.state_count;
    row.transition_count = st.transition_count;
    sc.rows.push_back(std::move(row));

    if (step == steps) break;
    auto succ = graph.successors(cur);
    if (succ.empty()) break;
    cur = succ[rng.below(succ.size())];
  }
  return sc;
}

StateCode translate_state(StateCode state, std::span<const std::string> from_scope,
                          std::span<const std::string> to_scope) {
  StateCode out = 0;
  for (std::size_t j = 0; j < to_scope.size(); ++j) {
    for (std::size_t i = 0; i < from_scope.size(); ++i) {
      if (from_scope[i] == to_scope[j]) {
        out = with_phase(out, j, phase_at(state, i));
        break;
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, StateCode>> jump_targets(const CausalFactorModel& model,
                                                            const std::string& situation,
                                                            StateCode state) {
  SituationGraph graph = successor_graph(model);
  if (!graph.has_node(situation))
    throw std::out_of_range("situation " + situation + " is not a node of the process graph");
  auto from_scope = effective_factors(model, situation);

  std::vector<std::pair<std::string, StateCode>> out;
  for (const auto& t : graph.successors(situation)) {
    auto to_scope = effective_factors(model, t);
    out.emplace_back(t, translate_state(state, from_scope, to_scope));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ram
