#pragma once

// Shared analyses over process expressions: aspect classification,
// nullability, guardedness of recursion. Used by validation and by the
// successor-graph construction.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ram/model.hpp"

namespace ram::detail {

struct ExprAnalysis {
  // Per process name: does its unfolding contain a non-aspect atom?
  std::map<std::string, bool> contains_plain;
  // Per process name: can it produce the empty trace?
  std::map<std::string, bool> nullable;

  const CausalFactorModel* model = nullptr;

  bool atom_is_aspect(const std::string& situation) const;
  bool is_aspect_tree(const ProcessPtr& e) const;
  bool expr_nullable(const ProcessPtr& e) const;
};

ExprAnalysis analyze(const CausalFactorModel& model);

/// Names of processes involved in recursion not guarded by any situation
/// atom (empty when recursion is well-guarded).
std::vector<std::string> unguarded_names(const CausalFactorModel& model,
                                         const ExprAnalysis& analysis);

/// Union of situation factor sets over all atoms of an aspect tree.
std::set<std::string> aspect_factor_union(const CausalFactorModel& model, const ProcessPtr& e);

}  // namespace ram::detail
