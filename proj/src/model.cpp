#include "ram/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "expr_analysis.hpp"

namespace ram {

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Inactive: return "inactive";
    case Phase::Active: return "active";
    case Phase::Mitigated: return "mitigated";
    case Phase::Mishap: return "mishap";
  }
  return "?";
}

const char* to_string(EndangermentClass c) {
  switch (c) {
    case EndangermentClass::Failure: return "f";
    case EndangermentClass::Disturbance: return "d";
    case EndangermentClass::Misuse: return "mu";
    case EndangermentClass::NearMishap: return "nm";
  }
  return "?";
}

const char* to_string(MitigationClass c) {
  switch (c) {
    case MitigationClass::FailSafe: return "failSafe";
    case MitigationClass::Deescalation: return "deescalation";
    case MitigationClass::Protection: return "protection";
    case MitigationClass::Uncontrolled: return "uncontrolled";
    case MitigationClass::Repair: return "repair";
  }
  return "?";
}

const char* class_symbol(MitigationClass c) {
  switch (c) {
    case MitigationClass::FailSafe: return "fs";
    case MitigationClass::Deescalation: return "des";
    case MitigationClass::Protection: return "prt";
    case MitigationClass::Uncontrolled: return "unc";
    case MitigationClass::Repair: return "rep";
  }
  return "?";
}

const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Requires: return "requires";
    case ConstraintKind::Causes: return "causes";
    case ConstraintKind::Denies: return "denies";
    case ConstraintKind::Excludes: return "excludes";
  }
  return "?";
}

std::string label_text(const ActionLabel& a) {
  std::string s;
  switch (a.kind) {
    case ActionKind::Activate:
      s = "e^" + a.factor + "_" + to_string(std::get<EndangermentClass>(a.action_class));
      break;
    case ActionKind::MishapStep:
      s = "e_m^" + a.factor + "_" + to_string(std::get<EndangermentClass>(a.action_class));
      break;
    case ActionKind::StartMitigate:
    case ActionKind::EndMitigate:
    case ActionKind::CompleteMitigate: {
      // Annotated mitigations are written with their class symbol and an
      // effect tag (alleviate / end / complete), plain ones with m_{s,e,c}.
      const char* tag = a.kind == ActionKind::StartMitigate  ? "alv"
                        : a.kind == ActionKind::EndMitigate  ? "end"
                                                             : "cpl";
      if (a.mechanism) {
        s = std::string(class_symbol(std::get<MitigationClass>(a.action_class))) + "^" +
            a.factor + "_" + tag + "/" + *a.mechanism;
      } else {
        const char* m = a.kind == ActionKind::StartMitigate  ? "m_s^"
                        : a.kind == ActionKind::EndMitigate  ? "m_e^"
                                                             : "m_c^";
        s = m + a.factor;
      }
      break;
    }
  }
  return s;
}

// -- process expression helpers ---------------------------------------------

static ProcessPtr node(ProcessExpr::Kind k, std::string name, ProcessPtr l, ProcessPtr r) {
  auto e = std::make_shared<ProcessExpr>();
  e->kind = k;
  e->name = std::move(name);
  e->left = std::move(l);
  e->right = std::move(r);
  return e;
}

ProcessPtr atom(std::string s) { return node(ProcessExpr::Kind::Atom, std::move(s), nullptr, nullptr); }
ProcessPtr ref(std::string p) { return node(ProcessExpr::Kind::Ref, std::move(p), nullptr, nullptr); }
ProcessPtr seq(ProcessPtr l, ProcessPtr r) { return node(ProcessExpr::Kind::Seq, {}, std::move(l), std::move(r)); }
ProcessPtr choice(ProcessPtr l, ProcessPtr r) { return node(ProcessExpr::Kind::Choice, {}, std::move(l), std::move(r)); }
ProcessPtr par(ProcessPtr l, ProcessPtr r) { return node(ProcessExpr::Kind::Par, {}, std::move(l), std::move(r)); }
ProcessPtr star(ProcessPtr body) { return node(ProcessExpr::Kind::Star, {}, std::move(body), nullptr); }

bool equal(const ProcessPtr& a, const ProcessPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->kind == b->kind && a->name == b->name && equal(a->left, b->left) &&
         equal(a->right, b->right);
}

const CausalFactor* CausalFactorModel::factor(const std::string& id) const {
  for (const auto& f : factors)
    if (f.id == id) return &f;
  return nullptr;
}

const Situation* CausalFactorModel::situation(const std::string& id) const {
  auto it = situations.find(id);
  return it == situations.end() ? nullptr : &it->second;
}

bool models_equal(const CausalFactorModel& a, const CausalFactorModel& b) {
  auto canon = [](std::vector<Constraint> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  auto sorted_factors = [](const CausalFactorModel& m) {
    auto v = m.factors;
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted_factors(a) != sorted_factors(b)) return false;
  if (a.situations.size() != b.situations.size()) return false;
  for (const auto& [id, sa] : a.situations) {
    auto it = b.situations.find(id);
    if (it == b.situations.end()) return false;
    const Situation& sb = it->second;
    if (sa.aspect != sb.aspect || sa.factors != sb.factors) return false;
    if (canon(sa.constraints) != canon(sb.constraints)) return false;
  }
  if (canon(a.global_constraints) != canon(b.global_constraints)) return false;
  if (a.root != b.root) return false;
  if (a.processes.size() != b.processes.size()) return false;
  for (const auto& [name, expr] : a.processes) {
    auto it = b.processes.find(name);
    if (it == b.processes.end() || !equal(expr, it->second)) return false;
  }
  return true;
}

// -- expression analyses ------------------------------------------------------

namespace detail {

bool ExprAnalysis::atom_is_aspect(const std::string& situation) const {
  const Situation* s = model->situation(situation);
  return s != nullptr && s->aspect;
}

bool ExprAnalysis::is_aspect_tree(const ProcessPtr& e) const {
  if (!e) return true;
  switch (e->kind) {
    case ProcessExpr::Kind::Atom: return atom_is_aspect(e->name);
    case ProcessExpr::Kind::Ref: {
      auto it = contains_plain.find(e->name);
      return it != contains_plain.end() && !it->second;
    }
    case ProcessExpr::Kind::Star: return is_aspect_tree(e->left);
    default: return is_aspect_tree(e->left) && is_aspect_tree(e->right);
  }
}

bool ExprAnalysis::expr_nullable(const ProcessPtr& e) const {
  if (!e) return true;
  switch (e->kind) {
    case ProcessExpr::Kind::Atom: return false;
    case ProcessExpr::Kind::Star: return true;
    case ProcessExpr::Kind::Ref: {
      auto it = nullable.find(e->name);
      return it != nullable.end() && it->second;
    }
    case ProcessExpr::Kind::Seq:
    case ProcessExpr::Kind::Par:
      return expr_nullable(e->left) && expr_nullable(e->right);
    case ProcessExpr::Kind::Choice:
      return expr_nullable(e->left) || expr_nullable(e->right);
  }
  return false;
}

ExprAnalysis analyze(const CausalFactorModel& model) {
  ExprAnalysis a;
  a.model = &model;
  for (const auto& [name, _] : model.processes) {
    a.contains_plain[name] = false;
    a.nullable[name] = false;
  }
  // Least fixpoints; both properties are monotone over the definitions.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [name, body] : model.processes) {
      bool plain = !a.is_aspect_tree(body);
      if (plain && !a.contains_plain[name]) {
        a.contains_plain[name] = true;
        changed = true;
      }
      bool nul = a.expr_nullable(body);
      if (nul && !a.nullable[name]) {
        a.nullable[name] = true;
        changed = true;
      }
    }
  }
  return a;
}

// Refs reachable from `e` before any guarding atom.
static void unguarded_refs(const ProcessPtr& e, const ExprAnalysis& an,
                           std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case ProcessExpr::Kind::Atom: return;
    case ProcessExpr::Kind::Ref: out.insert(e->name); return;
    case ProcessExpr::Kind::Star: unguarded_refs(e->left, an, out); return;
    case ProcessExpr::Kind::Seq:
      unguarded_refs(e->left, an, out);
      if (an.expr_nullable(e->left)) unguarded_refs(e->right, an, out);
      return;
    case ProcessExpr::Kind::Choice:
    case ProcessExpr::Kind::Par:
      unguarded_refs(e->left, an, out);
      unguarded_refs(e->right, an, out);
      return;
  }
}

std::vector<std::string> unguarded_names(const CausalFactorModel& model,
                                         const ExprAnalysis& an) {
  std::map<std::string, std::set<std::string>> graph;
  for (const auto& [name, body] : model.processes) unguarded_refs(body, an, graph[name]);

  // A name is bad iff it can reach itself through unguarded references.
  std::vector<std::string> bad;
  for (const auto& [start, _] : graph) {
    std::set<std::string> seen;
    std::vector<std::string> stack(graph[start].begin(), graph[start].end());
    bool cyclic = false;
    while (!stack.empty() && !cyclic) {
      auto n = stack.back();
      stack.pop_back();
      if (n == start) cyclic = true;
      if (!seen.insert(n).second) continue;
      auto it = graph.find(n);
      if (it != graph.end())
        for (const auto& m : it->second) stack.push_back(m);
    }
    if (cyclic) bad.push_back(start);
  }
  return bad;
}

std::set<std::string> aspect_factor_union(const CausalFactorModel& model, const ProcessPtr& e) {
  std::set<std::string> out;
  std::set<std::string> visited_refs;
  std::vector<ProcessPtr> stack{e};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    if (!cur) continue;
    switch (cur->kind) {
      case ProcessExpr::Kind::Atom: {
        if (const Situation* s = model.situation(cur->name))
          out.insert(s->factors.begin(), s->factors.end());
        break;
      }
      case ProcessExpr::Kind::Ref: {
        if (visited_refs.insert(cur->name).second) {
          auto it = model.processes.find(cur->name);
          if (it != model.processes.end()) stack.push_back(it->second);
        }
        break;
      }
      default:
        stack.push_back(cur->left);
        stack.push_back(cur->right);
    }
  }
  return out;
}

}  // namespace detail

// -- effective factors --------------------------------------------------------

namespace {

using Ctx = std::set<std::string>;

struct FactorCollector {
  const CausalFactorModel& model;
  const detail::ExprAnalysis& an;
  std::map<std::string, Ctx> gathered;  // situation -> superimposed factors
  std::set<std::pair<std::string, Ctx>> visited;  // (process name, context)

  void walk(const ProcessPtr& e, const Ctx& ctx) {
    if (!e) return;
    switch (e->kind) {
      case ProcessExpr::Kind::Atom: {
        auto& g = gathered[e->name];
        g.insert(ctx.begin(), ctx.end());
        return;
      }
      case ProcessExpr::Kind::Ref: {
        if (!visited.insert({e->name, ctx}).second) return;
        auto it = model.processes.find(e->name);
        if (it != model.processes.end()) walk(it->second, ctx);
        return;
      }
      case ProcessExpr::Kind::Seq:
      case ProcessExpr::Kind::Choice:
        walk(e->left, ctx);
        walk(e->right, ctx);
        return;
      case ProcessExpr::Kind::Star:
        walk(e->left, ctx);
        return;
      case ProcessExpr::Kind::Par: {
        bool la = an.is_aspect_tree(e->left);
        bool ra = an.is_aspect_tree(e->right);
        if (la && ra) return;  // pure aspect tree, contributes via a parent
        if (la || ra) {
          const ProcessPtr& asp = la ? e->left : e->right;
          const ProcessPtr& skel = la ? e->right : e->left;
          Ctx extended = ctx;
          auto fs = detail::aspect_factor_union(model, asp);
          extended.insert(fs.begin(), fs.end());
          walk(skel, extended);
          return;
        }
        // Ill-formed (validate rejects); fall back to plain recursion.
        walk(e->left, ctx);
        walk(e->right, ctx);
        return;
      }
    }
  }
};

std::vector<std::string> order_by_declaration(const CausalFactorModel& model,
                                              const std::set<std::string>& ids) {
  std::vector<std::string> out;
  for (const auto& f : model.factors)
    if (ids.count(f.id)) out.push_back(f.id);
  // Undeclared ids (flagged by validate) are kept, last, in lexical order.
  for (const auto& id : ids)
    if (!model.has_factor(id)) out.push_back(id);
  return out;
}

}  // namespace

std::vector<std::string> effective_factors(const CausalFactorModel& model,
                                           const std::string& situation) {
  const Situation* s = model.situation(situation);
  if (!s) throw std::out_of_range("unknown situation: " + situation);

  std::set<std::string> ids(s->factors.begin(), s->factors.end());
  if (!s->aspect && !model.root.empty()) {
    auto an = detail::analyze(model);
    FactorCollector fc{model, an, {}, {}};
    auto it = model.processes.find(model.root);
    if (it != model.processes.end()) fc.walk(it->second, {});
    auto g = fc.gathered.find(situation);
    if (g != fc.gathered.end()) ids.insert(g->second.begin(), g->second.end());
  }
  return order_by_declaration(model, ids);
}

// -- validation ----------------------------------------------------------------

namespace {

void check_constraint_basics(const CausalFactorModel& model, const std::string& where,
                             const std::vector<Constraint>& cs, std::vector<Diagnostic>& out) {
  for (const auto& c : cs) {
    if (c.left == c.right)
      out.push_back({Severity::Error, where,
                     std::string("constraint ") + to_string(c.kind) + " relates " + c.left +
                         " to itself"});
    for (const auto& id : {c.left, c.right})
      if (!model.has_factor(id))
        out.push_back({Severity::Error, where, "constraint references undeclared factor " + id});
  }
}

// Causes combined with denies or excludes on the same (unordered) pair is
// contradictory: the propagated activation would immediately be denied or
// undone.
void check_constraint_conflicts(const std::string& where, const std::vector<Constraint>& cs,
                                std::vector<Diagnostic>& out,
                                std::set<std::string>& reported_pairs) {
  auto any = [&](ConstraintKind k, const std::string& a, const std::string& b) {
    return std::any_of(cs.begin(), cs.end(), [&](const Constraint& c) {
      return c.kind == k && ((c.left == a && c.right == b) || (c.left == b && c.right == a));
    });
  };
  for (const auto& c : cs) {
    if (c.kind != ConstraintKind::Causes) continue;
    for (auto other : {ConstraintKind::Denies, ConstraintKind::Excludes}) {
      if (any(other, c.left, c.right)) {
        std::string a = std::min(c.left, c.right), b = std::max(c.left, c.right);
        std::string key = a + "/" + b + "/" + to_string(other);
        if (reported_pairs.insert(key).second)
          out.push_back({Severity::Error, where,
                         "conflicting constraints on (" + a + ", " + b + "): causes vs " +
                             to_string(other)});
      }
    }
  }
}

void walk_par_nodes(const ProcessPtr& e, const detail::ExprAnalysis& an,
                    const std::string& where, std::vector<Diagnostic>& out) {
  if (!e) return;
  if (e->kind == ProcessExpr::Kind::Par && !an.is_aspect_tree(e->left) &&
      !an.is_aspect_tree(e->right)) {
    out.push_back({Severity::Error, where,
                   "parallel composition of two non-aspect processes is not supported; "
                   "one side must be an aspect"});
  }
  walk_par_nodes(e->left, an, where, out);
  walk_par_nodes(e->right, an, where, out);
}

void walk_atoms(const ProcessPtr& e, const CausalFactorModel& model, const std::string& where,
                std::vector<Diagnostic>& out) {
  if (!e) return;
  if (e->kind == ProcessExpr::Kind::Atom && !model.situation(e->name))
    out.push_back({Severity::Error, where, "process references undeclared situation " + e->name});
  if (e->kind == ProcessExpr::Kind::Ref && !model.processes.count(e->name))
    out.push_back({Severity::Error, where, "process references undeclared process " + e->name});
  walk_atoms(e->left, model, where, out);
  walk_atoms(e->right, model, where, out);
}

}  // namespace

std::vector<Diagnostic> validate(const CausalFactorModel& model) {
  std::vector<Diagnostic> out;

  std::set<std::string> seen;
  for (const auto& f : model.factors) {
    if (f.id.empty()) out.push_back({Severity::Error, "<factor>", "factor id must be non-empty"});
    if (!seen.insert(f.id).second)
      out.push_back({Severity::Error, f.id, "duplicate factor id " + f.id});
    if (f.direct && f.off_repair)
      out.push_back({Severity::Error, f.id,
                     "factor " + f.id + " is both direct and offRepair; a completely "
                     "run-time-mitigable factor cannot require off-line repair"});
  }

  std::set<std::string> reported_pairs;
  check_constraint_basics(model, "<global>", model.global_constraints, out);
  check_constraint_conflicts("<global>", model.global_constraints, out, reported_pairs);

  for (const auto& [id, s] : model.situations) {
    for (const auto& fid : s.factors)
      if (!model.has_factor(fid))
        out.push_back({Severity::Error, id, "situation references undeclared factor " + fid});

    std::vector<Constraint> in_scope = model.global_constraints;
    in_scope.insert(in_scope.end(), s.constraints.begin(), s.constraints.end());
    check_constraint_basics(model, id, s.constraints, out);
    check_constraint_conflicts(id, in_scope, out, reported_pairs);

    // Situation-scoped constraints must stay within the situation's scope.
    std::vector<std::string> eff;
    try {
      eff = effective_factors(model, id);
    } catch (const std::out_of_range&) {
    }
    std::set<std::string> eff_set(eff.begin(), eff.end());
    for (const auto& c : s.constraints)
      for (const auto& fid : {c.left, c.right})
        if (model.has_factor(fid) && !eff_set.count(fid))
          out.push_back({Severity::Error, id,
                         "constraint factor " + fid + " is not in scope of situation " + id});
    if (eff.size() > 32)
      out.push_back({Severity::Error, id,
                     "situation " + id + " has " + std::to_string(eff.size()) +
                         " effective factors; at most 32 are supported"});
  }

  if (!model.root.empty() && !model.processes.count(model.root))
    out.push_back({Severity::Error, model.root, "root process " + model.root + " is not declared"});

  auto an = detail::analyze(model);
  for (const auto& [name, body] : model.processes) {
    walk_atoms(body, model, name, out);
    walk_par_nodes(body, an, name, out);
  }
  for (const auto& name : detail::unguarded_names(model, an))
    out.push_back({Severity::Error, name, "unguarded recursion through process " + name});

  // Deduplicate; validation is a pure function of the model.
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.severity < b.severity; });
  return out;
}

}  // namespace ram
