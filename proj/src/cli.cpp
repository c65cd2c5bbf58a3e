#include "ram/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ram/dsl.hpp"
#include "ram/planner.hpp"
#include "ram/process.hpp"
#include "ram/render.hpp"
#include "ram/trace.hpp"

namespace ram {

namespace {

struct CliError {
  int code;
  std::string message;
};

CausalFactorModel load_model(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{1, "cannot read file " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  ParseResult r = parse_model(buf.str(), path);
  for (const auto& d : r.diagnostics) err << format_diagnostic(d) << "\n";
  if (!r.ok()) throw CliError{1, "model " + path + " has errors"};
  return std::move(*r.model);
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError{1, "cannot write file " + path};
  f << text;
}

ComposeMode mode_from(const std::string& s) {
  if (s == "serial") return ComposeMode::Serial;
  if (s == "parallel") return ComposeMode::Parallel;
  return ComposeMode::Auto;
}

void print_stats(const RiskStructure& rs, std::ostream& out) {
  StructureStats st = stats(rs);
  out << "situation=" << rs.situation << " states=" << st.state_count
      << " transitions=" << st.transition_count << " endangerments=" << st.endangerment_count
      << " mitigations=" << st.mitigation_count << " mishapStates=" << st.mishap_state_count
      << "\n";
}

std::vector<Constraint> scoped_constraints(const CausalFactorModel& model,
                                           const std::string& situation,
                                           std::span<const std::string> scope) {
  std::vector<Constraint> cs = model.global_constraints;
  if (const Situation* s = model.situation(situation))
    cs.insert(cs.end(), s->constraints.begin(), s->constraints.end());
  std::erase_if(cs, [&](const Constraint& c) {
    auto in_scope = [&](const std::string& id) {
      return std::find(scope.begin(), scope.end(), id) != scope.end();
    };
    return !in_scope(c.left) || !in_scope(c.right);
  });
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  return cs;
}

}  // namespace

int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"risk analysis and run-time mitigation toolkit"};
  app.require_subcommand(1);

  std::string file, situation, dot_path, csv_path, state_spec, formula_text, mode = "auto";
  std::string start;
  int steps = 5, walks = 100, max_len = 20;
  std::uint64_t seed = 0;
  double p_activate = 0.5;
  std::size_t max_cycles = 100;
  bool show_stats = false, no_color = false, no_offline = false;

  auto* validate_cmd = app.add_subcommand("validate", "check a model file");
  validate_cmd->add_option("file", file)->required();

  auto* build_cmd = app.add_subcommand("build", "compose the risk structure of a situation");
  build_cmd->add_option("file", file)->required();
  build_cmd->add_option("--situation", situation)->required();
  build_cmd->add_option("--dot", dot_path, "write DOT to a file, or - for stdout");
  build_cmd->add_flag("--stats", show_stats);
  build_cmd->add_option("--mode", mode)->check(CLI::IsMember({"auto", "serial", "parallel"}));
  build_cmd->add_flag("--no-color", no_color);
  build_cmd->add_flag("--no-offline", no_offline);

  auto* endanger_cmd = app.add_subcommand("endanger", "endangerment-only subgraph");
  endanger_cmd->add_option("file", file)->required();
  endanger_cmd->add_option("--situation", situation)->required();
  endanger_cmd->add_option("--dot", dot_path)->required();
  endanger_cmd->add_flag("--no-color", no_color);

  auto* graph_cmd = app.add_subcommand("graph", "situation successor graph");
  graph_cmd->add_option("file", file)->required();
  graph_cmd->add_option("--dot", dot_path)->required();

  auto* sim_cmd = app.add_subcommand("simulate", "symbolic execution of the driving process");
  sim_cmd->add_option("file", file)->required();
  sim_cmd->add_option("--start", start)->required();
  sim_cmd->add_option("--steps", steps)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--p-activate", p_activate)->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--csv", csv_path, "write CSV to a file, or - for stdout");

  auto* plan_cmd = app.add_subcommand("plan", "shortest run-time mitigation plan");
  plan_cmd->add_option("file", file)->required();
  plan_cmd->add_option("--situation", situation)->required();
  plan_cmd->add_option("--state", state_spec)->required();

  auto* report_cmd = app.add_subcommand("report", "mitigation strategy report (JSON lines)");
  report_cmd->add_option("file", file)->required();
  report_cmd->add_option("--situation", situation)->required();
  report_cmd->add_option("--max-cycles", max_cycles);

  auto* check_cmd = app.add_subcommand("check", "random-walk temporal checking");
  check_cmd->add_option("file", file)->required();
  check_cmd->add_option("--situation", situation)->required();
  check_cmd->add_option("--formula", formula_text);
  check_cmd->add_option("--walks", walks)->check(CLI::PositiveNumber);
  check_cmd->add_option("--len", max_len)->check(CLI::PositiveNumber);
  check_cmd->add_option("--seed", seed);

  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*validate_cmd) {
      CausalFactorModel model = load_model(file, err);
      out << "ok: " << model.factors.size() << " factors, " << model.situations.size()
          << " situations, " << model.processes.size() << " processes\n";
      return 0;
    }

    if (*build_cmd || *endanger_cmd) {
      CausalFactorModel model = load_model(file, err);
      RiskStructure rs = compose_situation(model, situation, mode_from(mode));
      if (*endanger_cmd) rs = endangerment_subgraph(rs);
      if (show_stats || dot_path.empty()) print_stats(rs, out);
      if (!dot_path.empty()) {
        RenderOptions opts;
        opts.color_edges = !no_color;
        opts.include_offline = !no_offline;
        write_output(dot_path, render_risk_structure(rs, opts), out);
      }
      return 0;
    }

    if (*graph_cmd) {
      CausalFactorModel model = load_model(file, err);
      write_output(dot_path, render_situation_graph(successor_graph(model)), out);
      return 0;
    }

    if (*sim_cmd) {
      CausalFactorModel model = load_model(file, err);
      Scenario sc = sample_scenario(model, start, steps, seed, p_activate);
      RenderOptions opts;
      if (!csv_path.empty()) {
        opts.format = RenderFormat::Csv;
        write_output(csv_path, render_scenario(sc, opts), out);
      } else {
        opts.format = RenderFormat::PlainTable;
        out << render_scenario(sc, opts);
      }
      return 0;
    }

    if (*plan_cmd) {
      CausalFactorModel model = load_model(file, err);
      RiskStructure rs = compose_situation(model, situation);
      StateCode state = parse_state(state_spec, rs.scope);
      auto plan = plan_from(rs, state);
      if (!plan) {
        out << "no run-time mitigation plan from " << state_text(state, rs.scope) << "\n";
        return 0;
      }
      out << "plan from " << state_text(state, rs.scope) << " (" << plan->actions.size()
          << " actions):";
      for (const auto& a : plan->actions) out << " " << label_text(a);
      out << "\n";
      return 0;
    }

    if (*report_cmd) {
      CausalFactorModel model = load_model(file, err);
      RiskStructure rs = compose_situation(model, situation);
      out << render_strategy_report(rs, strategy_report(rs, max_cycles));
      return 0;
    }

    if (*check_cmd) {
      CausalFactorModel model = load_model(file, err);
      RiskStructure rs = compose_situation(model, situation);
      FormulaPtr f;
      if (!formula_text.empty()) {
        std::string error;
        f = parse_formula(formula_text, error);
        if (!f) throw CliError{1, "formula error: " + error};
      } else {
        f = constraints_to_formula(scoped_constraints(model, situation, rs.scope));
        if (!f) {
          out << "no constraints in scope of " << situation << "; nothing to check\n";
          return 0;
        }
      }
      auto verdicts = check_structure(rs, f, walks, max_len, seed);
      std::size_t violations = 0;
      std::optional<std::pair<std::size_t, std::size_t>> first;  // (walk, witness)
      for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (!verdicts[i].holds) {
          ++violations;
          if (!first) first = {i, verdicts[i].witness_index.value_or(0)};
        }
      }
      out << "formula: " << formula_to_string(f) << "\n";
      out << "walks=" << verdicts.size() << " violations=" << violations;
      if (first)
        out << " firstViolationWalk=" << first->first << " witnessIndex=" << first->second;
      out << "\n";
      return 0;
    }
  } catch (const CliError& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ram
