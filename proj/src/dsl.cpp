#include "ram/dsl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ram {

namespace {

// -- lexer --------------------------------------------------------------------

enum class Tok : std::uint8_t {
  Id, Keyword, Str, Int,
  Semi, Equals, LBrace, RBrace, LParen, RParen, Comma, Par, Choice, Star,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "version", "factor", "situation", "constraint", "process", "root",
      "class", "mishap", "direct", "offRepair", "reEndanger", "mitigation", "by",
      "aspect", "factors", "in",
      "requires", "causes", "denies", "excludes",
      "phi",
  };
  return kw;
}

struct Lexer {
  std::string_view src;
  std::string file;
  std::size_t pos = 0;
  int line = 1, col = 1;
  std::vector<ParseDiagnostic>& diags;

  SourceSpan here(int length = 1) const { return {file, line, col, length}; }

  char peek(std::size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }

  void advance() {
    if (pos >= src.size()) return;
    if (src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void error(const std::string& msg, SourceSpan span) {
    diags.push_back({std::move(span), Severity::Error, "lexical error: " + msg});
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos < src.size()) {
      char c = peek();
      if (c == '\r') { advance(); continue; }  // CRLF input
      if (c == ' ' || c == '\t' || c == '\n') { advance(); continue; }
      if (c == '#') {
        while (pos < src.size() && peek() != '\n') advance();
        continue;
      }
      SourceSpan span = here();
      if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
          id += peek();
          advance();
        }
        span.length = static_cast<int>(id.size());
        out.push_back({keywords().count(id) ? Tok::Keyword : Tok::Id, id, span});
        continue;
      }
      if (isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (isdigit(static_cast<unsigned char>(peek()))) {
          num += peek();
          advance();
        }
        span.length = static_cast<int>(num.size());
        out.push_back({Tok::Int, num, span});
        continue;
      }
      if (c == '"') {
        advance();
        std::string s;
        bool closed = false;
        while (pos < src.size()) {
          char d = peek();
          if (d == '"') { advance(); closed = true; break; }
          if (d == '\n') break;
          if (d == '\\') {
            advance();
            char e = peek();
            if (e == '"' || e == '\\') { s += e; advance(); }
            else { error("unknown escape in string", here()); advance(); }
            continue;
          }
          s += d;
          advance();
        }
        if (!closed) error("unterminated string", span);
        span.length = static_cast<int>(s.size()) + 2;
        out.push_back({Tok::Str, s, span});
        continue;
      }
      // U+2225 "parallel to", UTF-8 e2 88 a5
      if (static_cast<unsigned char>(c) == 0xE2 && static_cast<unsigned char>(peek(1)) == 0x88 &&
          static_cast<unsigned char>(peek(2)) == 0xA5) {
        advance(); advance(); advance();
        out.push_back({Tok::Par, "||", span});
        continue;
      }
      if (c == '|') {
        advance();
        if (peek() == '|') {
          advance();
          out.push_back({Tok::Par, "||", span});
        } else {
          out.push_back({Tok::Choice, "|", span});
        }
        continue;
      }
      switch (c) {
        case ';': out.push_back({Tok::Semi, ";", span}); advance(); continue;
        case '=': out.push_back({Tok::Equals, "=", span}); advance(); continue;
        case '{': out.push_back({Tok::LBrace, "{", span}); advance(); continue;
        case '}': out.push_back({Tok::RBrace, "}", span}); advance(); continue;
        case '(': out.push_back({Tok::LParen, "(", span}); advance(); continue;
        case ')': out.push_back({Tok::RParen, ")", span}); advance(); continue;
        case ',': out.push_back({Tok::Comma, ",", span}); advance(); continue;
        case '*': out.push_back({Tok::Star, "*", span}); advance(); continue;
        default:
          error(std::string("unexpected character '") + c + "'", span);
          advance();
          continue;
      }
    }
    out.push_back({Tok::End, "", here()});
    return out;
  }
};

// -- parser -------------------------------------------------------------------

MitigationClass default_mitigation(EndangermentClass e) {
  switch (e) {
    case EndangermentClass::Failure: return MitigationClass::FailSafe;
    case EndangermentClass::Disturbance: return MitigationClass::Deescalation;
    case EndangermentClass::Misuse: return MitigationClass::Uncontrolled;
    case EndangermentClass::NearMishap: return MitigationClass::Protection;
  }
  return MitigationClass::Deescalation;
}

struct Parser {
  std::vector<Token> toks;
  std::size_t at = 0;
  std::vector<ParseDiagnostic>& diags;
  std::map<const ProcessExpr*, SourceSpan> leaf_spans;

  const Token& cur() const { return toks[at]; }
  const Token& next() const { return toks[std::min(at + 1, toks.size() - 1)]; }
  void bump() { if (at + 1 < toks.size()) ++at; }

  bool at_kw(const char* kw) const { return cur().kind == Tok::Keyword && cur().text == kw; }

  void error(const std::string& msg) { error_at(msg, cur().span); }
  void error_at(const std::string& msg, SourceSpan span) {
    diags.push_back({std::move(span), Severity::Error, msg});
  }

  bool expect(Tok kind, const std::string& what) {
    if (cur().kind == kind) { bump(); return true; }
    error("syntax error: expected " + what + ", found '" + cur().text + "'");
    return false;
  }

  std::optional<std::string> expect_id(const std::string& what) {
    if (cur().kind == Tok::Id) {
      std::string s = cur().text;
      bump();
      return s;
    }
    if (at_kw("phi")) {
      error("syntax error: 'phi' is reserved and has no semantics in this version");
      bump();
      return std::nullopt;
    }
    error("syntax error: expected " + what + ", found '" + cur().text + "'");
    return std::nullopt;
  }

  void skip_to_semi() {
    while (cur().kind != Tok::Semi && cur().kind != Tok::End) bump();
    if (cur().kind == Tok::Semi) bump();
  }

  // A ';' in expression context is a sequence operator when an expression
  // follows; otherwise it terminates the declaration.
  bool semi_is_seq() const {
    if (cur().kind != Tok::Semi) return false;
    const Token& n = next();
    return n.kind == Tok::Id || n.kind == Tok::LParen || (n.kind == Tok::Keyword && n.text == "phi");
  }

  ProcessPtr parse_primary() {
    if (cur().kind == Tok::Id) {
      auto a = atom(cur().text);
      leaf_spans[a.get()] = cur().span;
      bump();
      return a;
    }
    if (cur().kind == Tok::LParen) {
      SourceSpan open = cur().span;
      bump();
      ProcessPtr inner = parse_seq();
      if (cur().kind == Tok::RParen) {
        bump();
      } else {
        error_at("syntax error: unbalanced parentheses", open);
      }
      return inner;
    }
    if (at_kw("phi")) {
      error("syntax error: 'phi' is reserved and has no semantics in this version");
      bump();
      return nullptr;
    }
    error("syntax error: expected situation or process name, found '" + cur().text + "'");
    return nullptr;
  }

  ProcessPtr parse_postfix() {
    ProcessPtr e = parse_primary();
    while (e && cur().kind == Tok::Star) {
      bump();
      e = star(std::move(e));
    }
    return e;
  }

  ProcessPtr parse_par() {
    ProcessPtr l = parse_postfix();
    while (l && cur().kind == Tok::Par) {
      bump();
      ProcessPtr r = parse_postfix();
      if (!r) return nullptr;
      l = par(std::move(l), std::move(r));
    }
    return l;
  }

  ProcessPtr parse_choice() {
    ProcessPtr l = parse_par();
    while (l && cur().kind == Tok::Choice) {
      bump();
      ProcessPtr r = parse_par();
      if (!r) return nullptr;
      l = choice(std::move(l), std::move(r));
    }
    return l;
  }

  ProcessPtr parse_seq() {
    ProcessPtr l = parse_choice();
    while (l && semi_is_seq()) {
      bump();
      ProcessPtr r = parse_choice();
      if (!r) return nullptr;
      l = seq(std::move(l), std::move(r));
    }
    return l;
  }
};

std::optional<EndangermentClass> endangerment_class_from(const std::string& s) {
  if (s == "f") return EndangermentClass::Failure;
  if (s == "d") return EndangermentClass::Disturbance;
  if (s == "mu") return EndangermentClass::Misuse;
  if (s == "nm") return EndangermentClass::NearMishap;
  return std::nullopt;
}

std::optional<MitigationClass> mitigation_class_from(const std::string& s) {
  if (s == "failSafe") return MitigationClass::FailSafe;
  if (s == "deescalation") return MitigationClass::Deescalation;
  if (s == "protection") return MitigationClass::Protection;
  if (s == "uncontrolled") return MitigationClass::Uncontrolled;
  if (s == "repair") return MitigationClass::Repair;
  return std::nullopt;
}

std::optional<ConstraintKind> constraint_kind_from(const std::string& s) {
  if (s == "requires") return ConstraintKind::Requires;
  if (s == "causes") return ConstraintKind::Causes;
  if (s == "denies") return ConstraintKind::Denies;
  if (s == "excludes") return ConstraintKind::Excludes;
  return std::nullopt;
}

struct ModelParser : Parser {
  CausalFactorModel model;
  std::map<std::string, SourceSpan> decl_spans;
  std::vector<std::pair<std::string, ProcessPtr>> raw_processes;  // unresolved leaves
  // Scoped constraints are attached after parsing so declaration order
  // between situations and constraints does not matter.
  std::vector<std::tuple<std::string, Constraint, SourceSpan>> scoped_constraints;

  explicit ModelParser(std::vector<Token> t, std::vector<ParseDiagnostic>& d)
      : Parser{std::move(t), 0, d, {}} {}

  void dup_check(const std::string& kind, const std::string& id, SourceSpan span, bool fresh) {
    if (!fresh)
      error_at("duplicate identifier: " + kind + " " + id + " is already declared", span);
    else
      decl_spans.emplace(id, span);
  }

  void parse_factor() {
    bump();  // 'factor'
    SourceSpan span = cur().span;
    auto id = expect_id("factor id");
    if (!id) { skip_to_semi(); return; }
    CausalFactor f;
    f.id = *id;
    if (cur().kind == Tok::Str) {
      f.name = cur().text;
      bump();
    }
    if (!at_kw("class")) {
      error("syntax error: expected 'class' in factor declaration");
      skip_to_semi();
      return;
    }
    bump();
    auto cls = expect_id("endangerment class (f, d, mu or nm)");
    if (!cls) { skip_to_semi(); return; }
    auto ec = endangerment_class_from(*cls);
    if (!ec) {
      error("syntax error: unknown endangerment class '" + *cls + "'");
      skip_to_semi();
      return;
    }
    f.endangerment_class = *ec;
    f.mitigation_class = default_mitigation(*ec);

    bool explicit_mitigation = false;
    while (cur().kind == Tok::Keyword) {
      if (at_kw("mishap")) { f.has_mishap_phase = true; bump(); }
      else if (at_kw("direct")) { f.direct = true; bump(); }
      else if (at_kw("offRepair")) { f.off_repair = true; bump(); }
      else if (at_kw("reEndanger")) { f.re_endanger = true; bump(); }
      else if (at_kw("mitigation")) {
        bump();
        auto mc = expect_id("mitigation class");
        if (!mc) { skip_to_semi(); return; }
        auto m = mitigation_class_from(*mc);
        if (!m) {
          error("syntax error: unknown mitigation class '" + *mc + "'");
          skip_to_semi();
          return;
        }
        f.mitigation_class = *m;
        explicit_mitigation = true;
        if (at_kw("by")) {
          bump();
          auto mech = expect_id("mechanism id");
          if (!mech) { skip_to_semi(); return; }
          f.mechanism = *mech;
        }
      } else {
        break;
      }
    }
    (void)explicit_mitigation;
    if (f.direct && f.off_repair)
      error_at("factor " + f.id + " may not be both direct and offRepair", span);
    dup_check("factor", f.id, span, model.factor(f.id) == nullptr);
    if (!model.factor(f.id)) model.factors.push_back(std::move(f));
    expect(Tok::Semi, "';'");
  }

  void parse_situation() {
    bump();  // 'situation'
    SourceSpan span = cur().span;
    auto id = expect_id("situation id");
    if (!id) { skip_to_semi(); return; }
    Situation s;
    s.id = *id;
    if (at_kw("aspect")) { s.aspect = true; bump(); }
    if (at_kw("factors")) {
      bump();
      if (!expect(Tok::LBrace, "'{'")) { skip_to_semi(); return; }
      bool first = true;
      while (cur().kind != Tok::RBrace && cur().kind != Tok::End) {
        if (!first && !expect(Tok::Comma, "','")) { skip_to_semi(); return; }
        first = false;
        auto fid = expect_id("factor id");
        if (!fid) { skip_to_semi(); return; }
        s.factors.push_back(*fid);
      }
      if (!expect(Tok::RBrace, "'}'")) { skip_to_semi(); return; }
    }
    std::sort(s.factors.begin(), s.factors.end());
    s.factors.erase(std::unique(s.factors.begin(), s.factors.end()), s.factors.end());
    bool fresh = !model.situations.count(s.id) &&
                 std::none_of(raw_processes.begin(), raw_processes.end(),
                              [&](const auto& p) { return p.first == s.id; });
    dup_check("situation", s.id, span, fresh);
    if (fresh) model.situations.emplace(s.id, std::move(s));
    expect(Tok::Semi, "';'");
  }

  void parse_constraint() {
    bump();  // 'constraint'
    std::optional<std::string> scope;
    if (at_kw("in")) {
      bump();
      scope = expect_id("situation id");
      if (!scope) { skip_to_semi(); return; }
    }
    SourceSpan span = cur().span;
    auto left = expect_id("factor id");
    if (!left) { skip_to_semi(); return; }
    if (cur().kind != Tok::Keyword || !constraint_kind_from(cur().text)) {
      error("syntax error: expected requires, causes, denies or excludes");
      skip_to_semi();
      return;
    }
    ConstraintKind kind = *constraint_kind_from(cur().text);
    bump();
    auto right = expect_id("factor id");
    if (!right) { skip_to_semi(); return; }
    Constraint c{kind, *left, *right};
    if (scope) {
      scoped_constraints.emplace_back(*scope, c, span);
    } else {
      model.global_constraints.push_back(c);
    }
    expect(Tok::Semi, "';'");
  }

  void parse_process() {
    bump();  // 'process'
    SourceSpan span = cur().span;
    auto name = expect_id("process name");
    if (!name) { skip_to_semi(); return; }
    if (!expect(Tok::Equals, "'='")) { skip_to_semi(); return; }
    ProcessPtr body = parse_seq();
    if (!body) { skip_to_semi(); return; }
    // Situations and processes share the reference namespace of expression
    // leaves, so their names may not collide.
    bool fresh = !model.processes.count(*name) && !model.situations.count(*name) &&
                 std::none_of(raw_processes.begin(), raw_processes.end(),
                              [&](const auto& p) { return p.first == *name; });
    dup_check("process", *name, span, fresh);
    if (fresh) raw_processes.emplace_back(*name, std::move(body));
    expect(Tok::Semi, "';'");
  }

  void parse_root() {
    bump();  // 'root'
    SourceSpan span = cur().span;
    auto name = expect_id("process name");
    if (!name) { skip_to_semi(); return; }
    if (!model.root.empty())
      error_at("duplicate identifier: root is already declared", span);
    else
      model.root = *name;
    expect(Tok::Semi, "';'");
  }

  void parse_version() {
    bump();  // 'version'
    if (cur().kind != Tok::Int) {
      error("syntax error: expected version number");
      skip_to_semi();
      return;
    }
    if (cur().text != "1") error("syntax error: unsupported version " + cur().text);
    bump();
    expect(Tok::Semi, "';'");
  }

  void run() {
    while (cur().kind != Tok::End) {
      if (at_kw("factor")) parse_factor();
      else if (at_kw("situation")) parse_situation();
      else if (at_kw("constraint")) parse_constraint();
      else if (at_kw("process")) parse_process();
      else if (at_kw("root")) parse_root();
      else if (at_kw("version")) parse_version();
      else {
        error("syntax error: expected a declaration, found '" + cur().text + "'");
        bump();
        skip_to_semi();
      }
    }
  }
};

// Situation leaves stay atoms, leaves naming declared processes become refs.
ProcessPtr resolve_leaves(const ProcessPtr& e, const CausalFactorModel& model,
                          const std::map<const ProcessExpr*, SourceSpan>& spans,
                          const std::string& file, std::vector<ParseDiagnostic>& diags) {
  if (!e) return nullptr;
  switch (e->kind) {
    case ProcessExpr::Kind::Atom: {
      if (model.situations.count(e->name)) return e;
      if (model.processes.count(e->name)) return ref(e->name);
      auto it = spans.find(e.get());
      SourceSpan span = it != spans.end() ? it->second : SourceSpan{file, 1, 1, 1};
      diags.push_back({span, Severity::Error,
                       "unknown reference: " + e->name + " is neither a situation nor a process"});
      return e;
    }
    case ProcessExpr::Kind::Ref: return e;
    case ProcessExpr::Kind::Star: {
      auto l = resolve_leaves(e->left, model, spans, file, diags);
      return star(std::move(l));
    }
    default: {
      auto l = resolve_leaves(e->left, model, spans, file, diags);
      auto r = resolve_leaves(e->right, model, spans, file, diags);
      switch (e->kind) {
        case ProcessExpr::Kind::Seq: return seq(std::move(l), std::move(r));
        case ProcessExpr::Kind::Choice: return choice(std::move(l), std::move(r));
        case ProcessExpr::Kind::Par: return par(std::move(l), std::move(r));
        default: return e;
      }
    }
  }
}

bool has_error(const std::vector<ParseDiagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace

std::string format_diagnostic(const ParseDiagnostic& d) {
  std::ostringstream os;
  os << d.span.file << ":" << d.span.line << ":" << d.span.column << ": "
     << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
  return os.str();
}

ParseResult parse_model(std::string_view text, std::string file) {
  ParseResult result;
  Lexer lex{text, file, 0, 1, 1, result.diagnostics};
  ModelParser p(lex.run(), result.diagnostics);
  p.run();

  CausalFactorModel model = std::move(p.model);

  for (const auto& [scope, constraint, span] : p.scoped_constraints) {
    auto it = model.situations.find(scope);
    if (it == model.situations.end()) {
      result.diagnostics.push_back(
          {span, Severity::Error, "unknown reference: situation " + scope + " in constraint scope"});
      continue;
    }
    it->second.constraints.push_back(constraint);
  }
  for (auto& [id, s] : model.situations) {
    std::sort(s.constraints.begin(), s.constraints.end());
    s.constraints.erase(std::unique(s.constraints.begin(), s.constraints.end()),
                        s.constraints.end());
  }
  std::sort(model.global_constraints.begin(), model.global_constraints.end());
  model.global_constraints.erase(
      std::unique(model.global_constraints.begin(), model.global_constraints.end()),
      model.global_constraints.end());

  // Process bodies are resolved after all declarations are known; recursion
  // is symbolic, never expanded here.
  for (const auto& [name, _] : p.raw_processes) model.processes[name] = nullptr;
  for (auto& [name, body] : p.raw_processes)
    model.processes[name] = resolve_leaves(body, model, p.leaf_spans, file, result.diagnostics);

  if (!model.root.empty() && !model.processes.count(model.root))
    result.diagnostics.push_back(
        {{file, 1, 1, 1}, Severity::Error, "unknown reference: root process " + model.root});

  if (!has_error(result.diagnostics)) {
    for (const auto& d : validate(model)) {
      auto it = p.decl_spans.find(d.location);
      SourceSpan span = it != p.decl_spans.end() ? it->second : SourceSpan{file, 1, 1, 1};
      result.diagnostics.push_back({span, d.severity, d.message});
    }
  }

  if (!has_error(result.diagnostics)) result.model = std::move(model);
  return result;
}

ProcessParseResult parse_process_expr(std::string_view text, std::string file) {
  ProcessParseResult r;
  Lexer lex{text, file, 0, 1, 1, r.diagnostics};
  Parser p{lex.run(), 0, r.diagnostics, {}};
  ProcessPtr e = p.parse_seq();
  if (e && p.cur().kind != Tok::End)
    p.error("syntax error: unexpected '" + p.cur().text + "' after expression");
  if (!has_error(r.diagnostics)) r.expr = std::move(e);
  return r;
}

ProcessParseResult parse_process_expr(std::string_view text, const CausalFactorModel& model,
                                      std::string file) {
  ProcessParseResult r;
  Lexer lex{text, file, 0, 1, 1, r.diagnostics};
  Parser p{lex.run(), 0, r.diagnostics, {}};
  ProcessPtr e = p.parse_seq();
  if (e && p.cur().kind != Tok::End)
    p.error("syntax error: unexpected '" + p.cur().text + "' after expression");
  if (e) e = resolve_leaves(e, model, p.leaf_spans, file, r.diagnostics);
  if (!has_error(r.diagnostics)) r.expr = std::move(e);
  return r;
}

// -- serialization ---------------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

void render_expr(const ProcessPtr& e, int parent_prec, std::string& out) {
  // Precedence: ; (0) < | (1) < || (2) < postfix * / leaf (3).
  if (!e) return;
  int prec = 3;
  switch (e->kind) {
    case ProcessExpr::Kind::Seq: prec = 0; break;
    case ProcessExpr::Kind::Choice: prec = 1; break;
    case ProcessExpr::Kind::Par: prec = 2; break;
    default: break;
  }
  bool parens = prec < parent_prec;
  if (parens) out += "(";
  switch (e->kind) {
    case ProcessExpr::Kind::Atom:
    case ProcessExpr::Kind::Ref:
      out += e->name;
      break;
    case ProcessExpr::Kind::Star:
      render_expr(e->left, 3, out);
      out += "*";
      break;
    case ProcessExpr::Kind::Seq:
      render_expr(e->left, 0, out);
      out += " ; ";
      render_expr(e->right, 1, out);
      break;
    case ProcessExpr::Kind::Choice:
      render_expr(e->left, 1, out);
      out += " | ";
      render_expr(e->right, 2, out);
      break;
    case ProcessExpr::Kind::Par:
      render_expr(e->left, 2, out);
      out += " || ";
      render_expr(e->right, 3, out);
      break;
  }
  if (parens) out += ")";
}

}  // namespace

std::string process_text(const ProcessPtr& expr) {
  std::string out;
  render_expr(expr, 0, out);
  return out;
}

std::string serialize_model(const CausalFactorModel& model) {
  auto diags = validate(model);
  if (std::any_of(diags.begin(), diags.end(),
                  [](const Diagnostic& d) { return d.severity == Severity::Error; }))
    throw std::invalid_argument("cannot serialize an invalid model: " + diags.front().message);

  std::string out = "# risk-analysis model, canonical form\n";

  auto factors = model.factors;
  std::sort(factors.begin(), factors.end(),
            [](const CausalFactor& a, const CausalFactor& b) { return a.id < b.id; });
  for (const auto& f : factors) {
    out += "factor " + f.id;
    if (!f.name.empty()) out += " " + quote(f.name);
    out += std::string(" class ") + to_string(f.endangerment_class);
    if (f.has_mishap_phase) out += " mishap";
    if (f.direct) out += " direct";
    if (f.off_repair) out += " offRepair";
    if (f.re_endanger) out += " reEndanger";
    if (f.mechanism || f.mitigation_class != default_mitigation(f.endangerment_class)) {
      out += std::string(" mitigation ") + to_string(f.mitigation_class);
      if (f.mechanism) out += " by " + *f.mechanism;
    }
    out += ";\n";
  }

  for (const auto& [id, s] : model.situations) {
    out += "situation " + id;
    if (s.aspect) out += " aspect";
    if (!s.factors.empty()) {
      out += " factors {";
      for (std::size_t i = 0; i < s.factors.size(); ++i)
        out += (i ? ", " : "") + s.factors[i];
      out += "}";
    }
    out += ";\n";
  }

  auto gc = model.global_constraints;
  std::sort(gc.begin(), gc.end(), [](const Constraint& a, const Constraint& b) {
    return std::tie(a.left, a.kind, a.right) < std::tie(b.left, b.kind, b.right);
  });
  gc.erase(std::unique(gc.begin(), gc.end()), gc.end());
  for (const auto& c : gc)
    out += "constraint " + c.left + " " + to_string(c.kind) + " " + c.right + ";\n";

  for (const auto& [id, s] : model.situations) {
    auto sc = s.constraints;
    std::sort(sc.begin(), sc.end(), [](const Constraint& a, const Constraint& b) {
      return std::tie(a.left, a.kind, a.right) < std::tie(b.left, b.kind, b.right);
    });
    for (const auto& c : sc)
      out += "constraint in " + id + " " + c.left + " " + to_string(c.kind) + " " + c.right + ";\n";
  }

  for (const auto& [name, body] : model.processes)
    out += "process " + name + " = " + process_text(body) + ";\n";
  if (!model.root.empty()) out += "root " + model.root + ";\n";
  return out;
}

}  // namespace ram
