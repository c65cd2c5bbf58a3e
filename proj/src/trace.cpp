#include "ram/trace.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ram/rng.hpp"

namespace ram {

namespace {

FormulaPtr make(Formula::Kind k, FormulaPtr l = nullptr, FormulaPtr r = nullptr) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->left = std::move(l);
  f->right = std::move(r);
  return f;
}

}  // namespace

FormulaPtr atom_phase(std::string factor, Phase p) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::AtomPhase;
  f->factor = std::move(factor);
  f->phase = p;
  return f;
}
FormulaPtr f_not(FormulaPtr a) { return make(Formula::Kind::Not, std::move(a)); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return make(Formula::Kind::And, std::move(a), std::move(b)); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return make(Formula::Kind::Or, std::move(a), std::move(b)); }
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) { return make(Formula::Kind::Implies, std::move(a), std::move(b)); }
FormulaPtr f_always(FormulaPtr a) { return make(Formula::Kind::Always, std::move(a)); }
FormulaPtr f_eventually(FormulaPtr a) { return make(Formula::Kind::Eventually, std::move(a)); }
FormulaPtr f_until(FormulaPtr a, FormulaPtr b) { return make(Formula::Kind::Until, std::move(a), std::move(b)); }
FormulaPtr f_weak_until(FormulaPtr a, FormulaPtr b) { return make(Formula::Kind::WeakUntil, std::move(a), std::move(b)); }
FormulaPtr f_once(FormulaPtr a) { return make(Formula::Kind::Once, std::move(a)); }

FormulaPtr constraint_to_formula(const Constraint& c) {
  auto active = [](const std::string& x) { return atom_phase(x, Phase::Active); };
  auto inactive = [](const std::string& x) { return atom_phase(x, Phase::Inactive); };
  switch (c.kind) {
    case ConstraintKind::Requires:
      return f_always(f_implies(active(c.left), f_once(active(c.right))));
    case ConstraintKind::Causes:
      return f_always(f_implies(active(c.left),
                                f_once(f_and(active(c.left), f_not(inactive(c.right))))));
    case ConstraintKind::Denies:
      return f_always(f_implies(active(c.right),
                                f_once(f_and(active(c.right), f_not(active(c.left))))));
    case ConstraintKind::Excludes:
      return f_always(f_implies(active(c.left),
                                f_once(f_and(active(c.left), inactive(c.right)))));
  }
  return nullptr;
}

FormulaPtr constraints_to_formula(std::span<const Constraint> cs) {
  FormulaPtr acc;
  for (const auto& c : cs) {
    FormulaPtr f = constraint_to_formula(c);
    acc = acc ? f_and(std::move(acc), std::move(f)) : std::move(f);
  }
  return acc;
}

FormulaPtr globally_precedes(const std::string& b, const std::string& a) {
  auto act_a = atom_phase(a, Phase::Active);
  auto act_b = atom_phase(b, Phase::Active);
  return f_implies(f_eventually(atom_phase(a, Phase::Active)),
                   f_until(f_not(act_a), f_and(act_b, f_not(atom_phase(a, Phase::Active)))));
}

// -- printing -----------------------------------------------------------------

namespace {

const char* phase_atom_name(Phase p) {
  switch (p) {
    case Phase::Inactive: return "inactive";
    case Phase::Active: return "active";
    case Phase::Mitigated: return "mitigated";
    case Phase::Mishap: return "mishap";
  }
  return "?";
}

int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    case Formula::Kind::Until:
    case Formula::Kind::WeakUntil: return 4;
    default: return 5;
  }
}

void print(const FormulaPtr& f, int parent, std::string& out) {
  if (!f) return;
  int prec = precedence(f->kind);
  bool parens = prec < parent;
  if (parens) out += "(";
  switch (f->kind) {
    case Formula::Kind::AtomPhase:
      out += std::string(phase_atom_name(f->phase)) + "(" + f->factor + ")";
      break;
    case Formula::Kind::Not:
      out += "!";
      print(f->left, 5, out);
      break;
    case Formula::Kind::Always:
      out += "G ";
      print(f->left, 5, out);
      break;
    case Formula::Kind::Eventually:
      out += "F ";
      print(f->left, 5, out);
      break;
    case Formula::Kind::Once:
      out += "O ";
      print(f->left, 5, out);
      break;
    case Formula::Kind::And:
      print(f->left, 3, out);
      out += " & ";
      print(f->right, 4, out);
      break;
    case Formula::Kind::Or:
      print(f->left, 2, out);
      out += " | ";
      print(f->right, 3, out);
      break;
    case Formula::Kind::Implies:  // right associative
      print(f->left, 2, out);
      out += " -> ";
      print(f->right, 1, out);
      break;
    case Formula::Kind::Until:
      print(f->left, 5, out);
      out += " U ";
      print(f->right, 4, out);
      break;
    case Formula::Kind::WeakUntil:
      print(f->left, 5, out);
      out += " W ";
      print(f->right, 4, out);
      break;
  }
  if (parens) out += ")";
}

}  // namespace

std::string formula_to_string(const FormulaPtr& f) {
  std::string out;
  print(f, 0, out);
  return out;
}

// -- formula parsing ------------------------------------------------------------

namespace {

struct FormulaParser {
  std::string_view src;
  std::size_t pos = 0;
  std::string error;

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
                                src[pos] == '\r'))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool eat_arrow() {
    skip_ws();
    if (pos + 1 < src.size() && src[pos] == '-' && src[pos + 1] == '>') {
      pos += 2;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_ws();
    std::string id;
    while (pos < src.size() && (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      id += src[pos++];
    return id;
  }

  std::string peek_ident() {
    std::size_t save = pos;
    std::string id = ident();
    pos = save;
    return id;
  }

  FormulaPtr fail(const std::string& msg) {
    if (error.empty()) error = msg;
    return nullptr;
  }

  FormulaPtr parse_implies() {
    FormulaPtr l = parse_or();
    if (!l) return nullptr;
    if (eat_arrow()) {
      FormulaPtr r = parse_implies();
      if (!r) return nullptr;
      return f_implies(std::move(l), std::move(r));
    }
    return l;
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    if (!l) return nullptr;
    while (true) {
      skip_ws();
      // '|' but not "->"
      if (pos < src.size() && src[pos] == '|') {
        ++pos;
        FormulaPtr r = parse_and();
        if (!r) return nullptr;
        l = f_or(std::move(l), std::move(r));
      } else {
        return l;
      }
    }
  }

  FormulaPtr parse_and() {
    FormulaPtr l = parse_until();
    if (!l) return nullptr;
    while (eat('&')) {
      FormulaPtr r = parse_until();
      if (!r) return nullptr;
      l = f_and(std::move(l), std::move(r));
    }
    return l;
  }

  FormulaPtr parse_until() {  // right associative
    FormulaPtr l = parse_unary();
    if (!l) return nullptr;
    std::string id = peek_ident();
    if (id == "U" || id == "W") {
      ident();
      FormulaPtr r = parse_until();
      if (!r) return nullptr;
      return id == "U" ? f_until(std::move(l), std::move(r))
                       : f_weak_until(std::move(l), std::move(r));
    }
    return l;
  }

  FormulaPtr parse_unary() {
    skip_ws();
    if (eat('!')) {
      FormulaPtr a = parse_unary();
      return a ? f_not(std::move(a)) : nullptr;
    }
    std::string id = peek_ident();
    if (id == "G" || id == "F" || id == "O") {
      ident();
      FormulaPtr a = parse_unary();
      if (!a) return nullptr;
      if (id == "G") return f_always(std::move(a));
      if (id == "F") return f_eventually(std::move(a));
      return f_once(std::move(a));
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    skip_ws();
    if (eat('(')) {
      FormulaPtr f = parse_implies();
      if (!f) return nullptr;
      if (!eat(')')) return fail("expected ')'");
      return f;
    }
    std::string id = ident();
    Phase p;
    if (id == "active") p = Phase::Active;
    else if (id == "inactive") p = Phase::Inactive;
    else if (id == "mitigated") p = Phase::Mitigated;
    else if (id == "mishap") p = Phase::Mishap;
    else return fail(id.empty() ? "expected a formula" : "unknown atom '" + id + "'");
    if (!eat('(')) return fail("expected '(' after " + id);
    std::string factor = ident();
    if (factor.empty()) return fail("expected factor id in " + id + "(...)");
    if (!eat(')')) return fail("expected ')' after factor id");
    return atom_phase(factor, p);
  }
};

}  // namespace

FormulaPtr parse_formula(std::string_view text, std::string& error) {
  FormulaParser p{text, 0, {}};
  FormulaPtr f = p.parse_implies();
  if (f) {
    p.skip_ws();
    if (p.pos != text.size()) {
      error = "unexpected trailing input at offset " + std::to_string(p.pos);
      return nullptr;
    }
  }
  error = p.error;
  return f;
}

// -- evaluation --------------------------------------------------------------------

namespace {

// Truth table of a sub-formula at every trace position, memoized per node.
struct Evaluator {
  std::span<const StateCode> trace;
  std::span<const std::string> scope;
  std::map<const Formula*, std::vector<char>> memo;

  const std::vector<char>& eval(const FormulaPtr& f) {
    auto it = memo.find(f.get());
    if (it != memo.end()) return it->second;
    std::size_t n = trace.size();
    std::vector<char> v(n, 0);
    switch (f->kind) {
      case Formula::Kind::AtomPhase: {
        std::size_t idx = scope.size();
        for (std::size_t i = 0; i < scope.size(); ++i)
          if (scope[i] == f->factor) { idx = i; break; }
        if (idx == scope.size())
          throw std::invalid_argument("formula atom references factor " + f->factor +
                                      " outside the trace scope");
        for (std::size_t i = 0; i < n; ++i) v[i] = phase_at(trace[i], idx) == f->phase;
        break;
      }
      case Formula::Kind::Not: {
        const auto& a = eval(f->left);
        for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
        break;
      }
      case Formula::Kind::And: {
        const auto& a = eval(f->left);
        const auto& b = eval(f->right);
        for (std::size_t i = 0; i < n; ++i) v[i] = a[i] && b[i];
        break;
      }
      case Formula::Kind::Or: {
        const auto& a = eval(f->left);
        const auto& b = eval(f->right);
        for (std::size_t i = 0; i < n; ++i) v[i] = a[i] || b[i];
        break;
      }
      case Formula::Kind::Implies: {
        const auto& a = eval(f->left);
        const auto& b = eval(f->right);
        for (std::size_t i = 0; i < n; ++i) v[i] = !a[i] || b[i];
        break;
      }
      case Formula::Kind::Always: {
        const auto& a = eval(f->left);
        char acc = 1;
        for (std::size_t i = n; i-- > 0;) {
          acc = acc && a[i];
          v[i] = acc;
        }
        break;
      }
      case Formula::Kind::Eventually: {
        const auto& a = eval(f->left);
        char acc = 0;
        for (std::size_t i = n; i-- > 0;) {
          acc = acc || a[i];
          v[i] = acc;
        }
        break;
      }
      case Formula::Kind::Until: {
        const auto& a = eval(f->left);
        const auto& b = eval(f->right);
        v[n - 1] = b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) v[i] = b[i] || (a[i] && v[i + 1]);
        break;
      }
      case Formula::Kind::WeakUntil: {
        const auto& a = eval(f->left);
        const auto& b = eval(f->right);
        v[n - 1] = b[n - 1] || a[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) v[i] = b[i] || (a[i] && v[i + 1]);
        break;
      }
      case Formula::Kind::Once: {
        const auto& a = eval(f->left);
        char acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
          acc = acc || a[i];
          v[i] = acc;
        }
        break;
      }
    }
    return memo.emplace(f.get(), std::move(v)).first->second;
  }

  // Least position violating the outermost Always; traverses conjunctions.
  std::size_t witness(const FormulaPtr& f) {
    if (f->kind == Formula::Kind::Always) {
      const auto& body = eval(f->left);
      for (std::size_t i = 0; i < body.size(); ++i)
        if (!body[i]) return i;
      return 0;
    }
    if (f->kind == Formula::Kind::And) {
      std::size_t w = trace.size();
      for (const auto& side : {f->left, f->right})
        if (!eval(side)[0]) w = std::min(w, witness(side));
      return w == trace.size() ? 0 : w;
    }
    return 0;
  }
};

}  // namespace

TraceVerdict check_trace(const FormulaPtr& f, std::span<const StateCode> trace,
                         std::span<const std::string> scope) {
  if (!f) throw std::invalid_argument("null formula");
  if (trace.empty()) throw std::invalid_argument("empty trace");
  Evaluator ev{trace, scope, {}};
  TraceVerdict v;
  v.holds = ev.eval(f)[0];
  if (!v.holds) v.witness_index = ev.witness(f);
  return v;
}

std::vector<StateCode> random_walk(const RiskStructure& rs, int max_len, std::uint64_t walk_seed) {
  Rng rng(walk_seed);
  std::vector<StateCode> trace;
  std::size_t cur = rs.index_of(rs.initial);
  trace.push_back(rs.initial);
  // transitions are sorted by source; locate each block by binary search
  auto begin_of = [&](std::uint32_t src) {
    return std::partition_point(rs.transitions.begin(), rs.transitions.end(),
                                [&](const RiskStructure::Transition& t) { return t.source < src; });
  };
  for (int len = 1; len < max_len; ++len) {
    auto it = begin_of(static_cast<std::uint32_t>(cur));
    std::size_t degree = 0;
    for (auto j = it; j != rs.transitions.end() && j->source == cur; ++j) ++degree;
    if (degree == 0) break;
    auto pick = it + static_cast<std::ptrdiff_t>(rng.below(degree));
    cur = pick->target;
    trace.push_back(rs.states[cur]);
  }
  return trace;
}

namespace {

void check_atom_scope(const FormulaPtr& f, std::span<const std::string> scope) {
  if (!f) return;
  if (f->kind == Formula::Kind::AtomPhase) {
    if (std::find(scope.begin(), scope.end(), f->factor) == scope.end())
      throw std::invalid_argument("formula atom references factor " + f->factor +
                                  " outside the structure scope");
    return;
  }
  check_atom_scope(f->left, scope);
  check_atom_scope(f->right, scope);
}

}  // namespace

std::vector<TraceVerdict> check_structure(const RiskStructure& rs, const FormulaPtr& f, int walks,
                                          int max_len, std::uint64_t seed) {
  if (walks < 1 || max_len < 1) throw std::invalid_argument("walks and maxLen must be >= 1");
  if (!f) throw std::invalid_argument("null formula");
  check_atom_scope(f, rs.scope);  // fail before the parallel region
  std::vector<TraceVerdict> out(static_cast<std::size_t>(walks));

#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < walks; ++i) {
    auto trace = random_walk(rs, max_len, stream_seed(seed, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] = check_trace(f, trace, rs.scope);
  }
  return out;
}

}  // namespace ram
