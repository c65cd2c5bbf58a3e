#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ram {

/// Lifecycle phase of a causal factor. Inactive is the initial phase of
/// every factor; Mishap is absorbing (no transitions leave it).
enum class Phase : std::uint8_t { Inactive = 0, Active = 1, Mitigated = 2, Mishap = 3 };

enum class EndangermentClass : std::uint8_t { Failure, Disturbance, Misuse, NearMishap };
enum class MitigationClass : std::uint8_t { FailSafe, Deescalation, Protection, Uncontrolled, Repair };

enum class ActionKind : std::uint8_t {
  Activate,          // inactive -> active (also mitigated -> active when re-endangering)
  MishapStep,        // active -> mishap
  StartMitigate,     // active -> mitigated
  EndMitigate,       // mitigated -> inactive
  CompleteMitigate,  // active -> inactive, one step
};

constexpr bool is_endangerment(ActionKind k) {
  return k == ActionKind::Activate || k == ActionKind::MishapStep;
}
constexpr bool is_mitigation(ActionKind k) { return !is_endangerment(k); }

const char* to_string(Phase p);
const char* to_string(EndangermentClass c);  // "f", "d", "mu", "nm"
const char* to_string(MitigationClass c);    // "failSafe", ...
const char* class_symbol(MitigationClass c); // "fs", "des", "prt", "unc", "rep"

/// Transition label of a risk structure. Endangering kinds carry an
/// EndangermentClass, mitigating kinds a MitigationClass; a mechanism id
/// may annotate mitigations; `offline` marks end-mitigate steps that can
/// only happen with the vehicle out of order.
struct ActionLabel {
  std::string factor;
  ActionKind kind = ActionKind::Activate;
  std::variant<EndangermentClass, MitigationClass> action_class = EndangermentClass::Failure;
  std::optional<std::string> mechanism;
  bool offline = false;

  bool endangerment() const { return is_endangerment(kind); }
  bool mitigation() const { return is_mitigation(kind); }

  auto operator<=>(const ActionLabel&) const = default;
};

/// Symbolic rendering, e.g. "e^W_d", "m_s^W", "prt^C_alv/Ab".
std::string label_text(const ActionLabel& a);

struct CausalFactor {
  std::string id;    // short symbol, e.g. "W"
  std::string name;  // human-readable, e.g. "badWeather"
  EndangermentClass endangerment_class = EndangermentClass::Disturbance;
  bool has_mishap_phase = false;
  bool direct = false;      // complete one-step mitigation available at run-time
  bool off_repair = false;  // end-mitigate requires taking the vehicle out of order
  bool re_endanger = false; // mitigated -> active transition possible
  MitigationClass mitigation_class = MitigationClass::Deescalation;
  std::optional<std::string> mechanism;

  auto operator<=>(const CausalFactor&) const = default;
};

enum class ConstraintKind : std::uint8_t { Requires, Causes, Denies, Excludes };

const char* to_string(ConstraintKind k);

struct Constraint {
  ConstraintKind kind = ConstraintKind::Requires;
  std::string left;
  std::string right;

  auto operator<=>(const Constraint&) const = default;
};

// -- process expressions ----------------------------------------------------

struct ProcessExpr;
using ProcessPtr = std::shared_ptr<const ProcessExpr>;

/// Expression tree over driving situations: atoms, references to named
/// processes (recursion allowed when guarded), sequence, choice, parallel
/// composition (aspect superimposition) and repetition.
struct ProcessExpr {
  enum class Kind : std::uint8_t { Atom, Ref, Seq, Choice, Par, Star };
  Kind kind = Kind::Atom;
  std::string name;        // Atom: situation id; Ref: process name
  ProcessPtr left, right;  // Star uses left only
};

ProcessPtr atom(std::string situation);
ProcessPtr ref(std::string process);
ProcessPtr seq(ProcessPtr l, ProcessPtr r);
ProcessPtr choice(ProcessPtr l, ProcessPtr r);
ProcessPtr par(ProcessPtr l, ProcessPtr r);
ProcessPtr star(ProcessPtr body);

bool equal(const ProcessPtr& a, const ProcessPtr& b);

// ---------------------------------------------------------------------------

struct Situation {
  std::string id;
  bool aspect = false;               // regions superimpose factors, they are not process nodes
  std::vector<std::string> factors;  // sorted, duplicate-free
  std::vector<Constraint> constraints;

  auto operator<=>(const Situation&) const = default;
};

struct CausalFactorModel {
  std::vector<CausalFactor> factors;  // declaration order, ids unique
  std::map<std::string, Situation> situations;
  std::map<std::string, ProcessPtr> processes;
  std::string root;  // name of the root process; empty when none declared
  std::vector<Constraint> global_constraints;

  const CausalFactor* factor(const std::string& id) const;
  const Situation* situation(const std::string& id) const;
  bool has_factor(const std::string& id) const { return factor(id) != nullptr; }
};

/// Structural equality; factor declaration order is not significant.
bool models_equal(const CausalFactorModel& a, const CausalFactorModel& b);

enum class Severity : std::uint8_t { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string location;  // factor/situation/constraint/process the finding is about
  std::string message;

  auto operator<=>(const Diagnostic&) const = default;
};

/// Checks all model invariants: unique non-empty ids, flag compatibility,
/// constraint conflicts, dangling references, guarded recursion, and the
/// superimposition discipline for parallel composition. Pure; an empty
/// result means the model is well-formed.
std::vector<Diagnostic> validate(const CausalFactorModel& model);

/// Factors in scope for a situation: its own factors plus, for process
/// nodes, the factors of every aspect superimposed on it anywhere in the
/// process tree (transitively through parallel composition). Result is in
/// model declaration order. Throws std::out_of_range for unknown ids.
std::vector<std::string> effective_factors(const CausalFactorModel& model,
                                           const std::string& situation);

}  // namespace ram
