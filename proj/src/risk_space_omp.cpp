// Level-synchronous parallel construction of the reachable risk state
// space. Each BFS level expands frontier states across threads; the visited
// set is only read during a level and extended at the merge point, and the
// final structure is canonicalized, so the result is identical to the
// serial builder's regardless of scheduling.

#include <algorithm>
#include <cstddef>
#include <unordered_set>
#include <vector>

#include "ram/risk_space.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ram::detail {

#ifndef _OPENMP

RiskStructure compose_parallel(const Expander& ex, StateCode initial) {
  return compose_serial(ex, initial);
}

#else

RiskStructure compose_parallel(const Expander& ex, StateCode initial) {
  std::unordered_set<StateCode> visited{initial};
  std::vector<StateCode> states{initial};
  std::vector<RawTransition> transitions;
  std::vector<StateCode> frontier{initial};

  while (!frontier.empty()) {
    std::vector<std::vector<RawTransition>> per_thread_trans;
    std::vector<std::vector<StateCode>> per_thread_new;

#pragma omp parallel
    {
      std::vector<RawTransition> local_trans;
      std::vector<StateCode> local_new;
      std::vector<Expander::Succ> succ;

#pragma omp for schedule(dynamic, 64) nowait
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(frontier.size()); ++i) {
        StateCode s = frontier[static_cast<std::size_t>(i)];
        ex.successors(s, succ);
        for (const auto& [action, target] : succ) {
          local_trans.push_back({s, action, target});
          if (!visited.count(target)) local_new.push_back(target);
        }
      }

#pragma omp critical
      {
        per_thread_trans.push_back(std::move(local_trans));
        per_thread_new.push_back(std::move(local_new));
      }
    }

    std::vector<StateCode> next;
    for (auto& v : per_thread_new) next.insert(next.end(), v.begin(), v.end());
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());

    for (StateCode s : next) visited.insert(s);
    states.insert(states.end(), next.begin(), next.end());
    for (auto& v : per_thread_trans)
      transitions.insert(transitions.end(), v.begin(), v.end());

    frontier = std::move(next);
  }

  return canonicalize(ex, initial, std::move(states), std::move(transitions));
}

#endif

}  // namespace ram::detail
