#include "ram/risk_space.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace ram {

namespace {
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
}

int raised_count(StateCode s, std::size_t n_factors) {
  int n = 0;
  for (std::size_t i = 0; i < n_factors; ++i) {
    Phase p = phase_at(s, i);
    if (p == Phase::Active || p == Phase::Mishap) ++n;
  }
  return n;
}

bool RiskStructure::has_state(StateCode s) const {
  return std::binary_search(states.begin(), states.end(), s);
}

std::size_t RiskStructure::index_of(StateCode s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || *it != s)
    throw std::out_of_range("state " + state_text(s, scope) + " not in structure");
  return static_cast<std::size_t>(it - states.begin());
}

std::size_t RiskStructure::scope_index(const std::string& factor) const {
  for (std::size_t i = 0; i < scope.size(); ++i)
    if (scope[i] == factor) return i;
  throw std::out_of_range("factor " + factor + " not in scope");
}

std::string state_text(StateCode s, std::span<const std::string> scope) {
  std::string out;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    switch (phase_at(s, i)) {
      case Phase::Inactive: break;
      case Phase::Active: out += scope[i]; break;
      case Phase::Mitigated: out += "~" + scope[i]; break;
      case Phase::Mishap: out += "_" + scope[i]; break;
    }
  }
  return out.empty() ? "0" : out;
}

StateCode parse_state(const std::string& spec, std::span<const std::string> scope) {
  StateCode s = 0;
  if (spec.empty() || spec == "0") return s;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? spec.size() : comma + 1;
    if (item.empty()) continue;
    Phase p = Phase::Active;
    if (item[0] == '~') {
      p = Phase::Mitigated;
      item.erase(0, 1);
    } else if (item[0] == '_') {
      p = Phase::Mishap;
      item.erase(0, 1);
    }
    auto it = std::find(scope.begin(), scope.end(), item);
    if (it == scope.end())
      throw std::invalid_argument("factor " + item + " not in scope of this situation");
    s = with_phase(s, static_cast<std::size_t>(it - scope.begin()), p);
  }
  return s;
}

// -- expander -----------------------------------------------------------------

namespace detail {

Expander::Expander(const CausalFactorModel& model, const std::string& situation)
    : situation_(situation) {
  scope_ = effective_factors(model, situation);
  if (scope_.size() > 32)
    throw std::invalid_argument("situation " + situation + " has more than 32 factors");

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < scope_.size(); ++i) index[scope_[i]] = i;

  factors_.reserve(scope_.size());
  for (const auto& id : scope_) {
    const CausalFactor* f = model.factor(id);
    if (!f) throw std::out_of_range("undeclared factor " + id + " in scope");
    factors_.push_back(f);
  }

  // Action table, one label per existing phase-model edge, scope order.
  auto add = [&](ActionLabel l) {
    labels_.push_back(std::move(l));
    return static_cast<std::uint32_t>(labels_.size() - 1);
  };
  for (const CausalFactor* f : factors_) {
    FactorActions fa{kNone, kNone, kNone, kNone, kNone};
    fa.activate = add({f->id, ActionKind::Activate, f->endangerment_class, {}, false});
    if (f->has_mishap_phase)
      fa.mishap = add({f->id, ActionKind::MishapStep, f->endangerment_class, {}, false});
    fa.start = add({f->id, ActionKind::StartMitigate, f->mitigation_class, f->mechanism, false});
    fa.end = add({f->id, ActionKind::EndMitigate, f->mitigation_class, f->mechanism, f->off_repair});
    if (f->direct)
      fa.complete = add({f->id, ActionKind::CompleteMitigate, f->mitigation_class, f->mechanism, false});
    factor_actions_.push_back(fa);
  }

  // Constraint tables: global plus situation-scoped, filtered to the scope.
  const Situation* sit = model.situation(situation);
  std::vector<Constraint> cs = model.global_constraints;
  if (sit) cs.insert(cs.end(), sit->constraints.begin(), sit->constraints.end());

  requires_.resize(scope_.size());
  blocked_by_.resize(scope_.size());
  excludes_.resize(scope_.size());
  for (const auto& c : cs) {
    auto li = index.find(c.left);
    auto ri = index.find(c.right);
    if (li == index.end() || ri == index.end()) continue;
    std::size_t l = li->second, r = ri->second;
    switch (c.kind) {
      case ConstraintKind::Requires: requires_[l].push_back(r); break;
      case ConstraintKind::Causes: causes_.push_back({l, r}); break;
      case ConstraintKind::Denies: blocked_by_[r].push_back(l); break;
      case ConstraintKind::Excludes:
        blocked_by_[r].push_back(l);
        excludes_[l].push_back(r);
        break;
    }
  }
  for (auto& v : requires_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& v : blocked_by_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& v : excludes_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  std::sort(causes_.begin(), causes_.end());
  causes_.erase(std::unique(causes_.begin(), causes_.end()), causes_.end());
}

bool Expander::activation_enabled(StateCode s, std::size_t factor) const {
  for (std::size_t r : requires_[factor])
    if (phase_at(s, r) != Phase::Active) return false;
  for (std::size_t b : blocked_by_[factor])
    if (phase_at(s, b) == Phase::Active) return false;
  return true;
}

StateCode Expander::apply_activation(StateCode s, std::size_t factor) const {
  StateCode t = with_phase(s, factor, Phase::Active);
  std::uint64_t fresh = 1ull << factor;  // factors activated by this transition

  // Causes closure: rounds over the relation in canonical order until stable.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [x, y] : causes_) {
      if (!(fresh & (1ull << x))) continue;
      if (phase_at(t, y) != Phase::Inactive) continue;
      if (!activation_enabled(t, y)) continue;
      t = with_phase(t, y, Phase::Active);
      fresh |= 1ull << y;
      changed = true;
    }
  }

  // Newly activated factors render their excluded factors inactive.
  for (std::size_t x = 0; x < scope_.size(); ++x) {
    if (!(fresh & (1ull << x))) continue;
    for (std::size_t y : excludes_[x]) {
      Phase p = phase_at(t, y);
      if (p == Phase::Active || p == Phase::Mitigated) t = with_phase(t, y, Phase::Inactive);
    }
  }
  return t;
}

void Expander::successors(StateCode s, std::vector<Succ>& out) const {
  out.clear();
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    const CausalFactor& f = *factors_[i];
    const FactorActions& fa = factor_actions_[i];
    switch (phase_at(s, i)) {
      case Phase::Inactive:
        if (activation_enabled(s, i)) out.push_back({fa.activate, apply_activation(s, i)});
        break;
      case Phase::Active:
        if (f.has_mishap_phase) out.push_back({fa.mishap, with_phase(s, i, Phase::Mishap)});
        out.push_back({fa.start, with_phase(s, i, Phase::Mitigated)});
        if (f.direct) out.push_back({fa.complete, with_phase(s, i, Phase::Inactive)});
        break;
      case Phase::Mitigated:
        if (f.re_endanger && activation_enabled(s, i))
          out.push_back({fa.activate, apply_activation(s, i)});
        out.push_back({fa.end, with_phase(s, i, Phase::Inactive)});
        break;
      case Phase::Mishap:
        break;  // absorbing for this factor
    }
  }
}

RiskStructure canonicalize(const Expander& ex, StateCode initial, std::vector<StateCode> states,
                           std::vector<RawTransition> transitions) {
  RiskStructure rs;
  rs.situation = ex.situation();
  rs.scope = ex.scope();
  rs.initial = initial;

  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  rs.states = std::move(states);

  // Keep only action labels that are actually used, in canonical order.
  std::vector<std::uint32_t> used_count(ex.labels().size(), 0);
  for (const auto& t : transitions) used_count[t.action] = 1;
  std::vector<std::uint32_t> remap(ex.labels().size(), 0);
  for (std::size_t i = 0; i < ex.labels().size(); ++i) {
    if (used_count[i]) {
      remap[i] = static_cast<std::uint32_t>(rs.actions.size());
      rs.actions.push_back(ex.labels()[i]);
    }
  }

  rs.transitions.reserve(transitions.size());
  for (const auto& t : transitions) {
    rs.transitions.push_back({static_cast<std::uint32_t>(rs.index_of(t.source)), remap[t.action],
                              static_cast<std::uint32_t>(rs.index_of(t.target))});
  }
  std::sort(rs.transitions.begin(), rs.transitions.end());
  rs.transitions.erase(std::unique(rs.transitions.begin(), rs.transitions.end()),
                       rs.transitions.end());
  return rs;
}

RiskStructure compose_serial(const Expander& ex, StateCode initial) {
  std::vector<StateCode> states{initial};
  std::unordered_set<StateCode> visited{initial};
  std::vector<RawTransition> transitions;
  std::vector<Expander::Succ> succ;

  for (std::size_t head = 0; head < states.size(); ++head) {
    StateCode s = states[head];
    ex.successors(s, succ);
    for (const auto& [action, target] : succ) {
      transitions.push_back({s, action, target});
      if (visited.insert(target).second) states.push_back(target);
    }
  }
  return canonicalize(ex, initial, std::move(states), std::move(transitions));
}

}  // namespace detail

// -- public entry points --------------------------------------------------------

RiskStructure expand_phase_model(const CausalFactor& factor) {
  CausalFactorModel m;
  m.factors.push_back(factor);
  Situation s;
  s.id = "<factor>";
  s.factors = {factor.id};
  m.situations[s.id] = s;
  return compose_situation(m, s.id, ComposeMode::Serial);
}

RiskStructure compose_from(const CausalFactorModel& model, const std::string& situation,
                           StateCode initial, ComposeMode mode) {
  detail::Expander ex(model, situation);
  bool parallel = mode == ComposeMode::Parallel;
  if (mode == ComposeMode::Auto) parallel = ex.scope().size() >= 8;
  return parallel ? detail::compose_parallel(ex, initial) : detail::compose_serial(ex, initial);
}

RiskStructure compose_situation(const CausalFactorModel& model, const std::string& situation,
                                ComposeMode mode) {
  return compose_from(model, situation, 0, mode);
}

RiskStructure endangerment_subgraph(const RiskStructure& rs) {
  // Adjacency over endangerment edges only, then reachability from initial.
  std::vector<std::vector<std::size_t>> adj(rs.states.size());
  std::vector<const RiskStructure::Transition*> red;
  red.reserve(rs.transitions.size());
  for (const auto& t : rs.transitions) {
    if (rs.actions[t.action].endangerment()) {
      adj[t.source].push_back(red.size());
      red.push_back(&t);
    }
  }

  std::vector<char> reach(rs.states.size(), 0);
  std::size_t init = rs.index_of(rs.initial);
  std::vector<std::size_t> queue{init};
  reach[init] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (std::size_t e : adj[queue[head]]) {
      std::size_t tgt = red[e]->target;
      if (!reach[tgt]) {
        reach[tgt] = 1;
        queue.push_back(tgt);
      }
    }
  }

  RiskStructure out;
  out.situation = rs.situation;
  out.scope = rs.scope;
  out.initial = rs.initial;
  for (std::size_t i = 0; i < rs.states.size(); ++i)
    if (reach[i]) out.states.push_back(rs.states[i]);

  std::vector<std::uint32_t> action_remap(rs.actions.size(), 0);
  std::vector<char> action_used(rs.actions.size(), 0);
  for (const auto* t : red)
    if (reach[t->source]) action_used[t->action] = 1;
  for (std::size_t i = 0; i < rs.actions.size(); ++i) {
    if (action_used[i]) {
      action_remap[i] = static_cast<std::uint32_t>(out.actions.size());
      out.actions.push_back(rs.actions[i]);
    }
  }
  for (const auto* t : red) {
    if (!reach[t->source]) continue;
    out.transitions.push_back({static_cast<std::uint32_t>(out.index_of(rs.states[t->source])),
                               action_remap[t->action],
                               static_cast<std::uint32_t>(out.index_of(rs.states[t->target]))});
  }
  std::sort(out.transitions.begin(), out.transitions.end());
  return out;
}

StructureStats stats(const RiskStructure& rs) {
  StructureStats st;
  st.state_count = rs.states.size();
  st.transition_count = rs.transitions.size();
  for (const auto& t : rs.transitions) {
    if (rs.actions[t.action].endangerment())
      ++st.endangerment_count;
    else
      ++st.mitigation_count;
  }
  for (StateCode s : rs.states) {
    for (std::size_t i = 0; i < rs.scope.size(); ++i) {
      if (phase_at(s, i) == Phase::Mishap) {
        ++st.mishap_state_count;
        break;
      }
    }
  }
  return st;
}

}  // namespace ram
