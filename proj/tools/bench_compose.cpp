// Compares the serial reference builder against the OpenMP frontier builder
// on unconstrained n-factor compositions (3^n states, n*3^n transitions)
// and verifies that both produce the identical structure.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "ram/risk_space.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace ram;

namespace {

CausalFactorModel product_model(int n) {
  CausalFactorModel m;
  Situation s;
  s.id = "bench";
  for (int i = 0; i < n; ++i) {
    CausalFactor f;
    f.id = "F" + std::to_string(i);
    f.endangerment_class = EndangermentClass::Disturbance;
    m.factors.push_back(f);
    s.factors.push_back(f.id);
  }
  std::sort(s.factors.begin(), s.factors.end());
  m.situations[s.id] = s;
  return m;
}

double best_of(int repeat, const CausalFactorModel& m, ComposeMode mode, RiskStructure& out) {
  double best = 1e300;
  for (int i = 0; i < repeat; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    out = compose_situation(m, "bench", mode);
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> sizes;
  int repeat = 3;
  bool verify_only = false;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--factors" && i + 1 < argc) sizes.push_back(std::atoi(argv[++i]));
    else if (a == "--repeat" && i + 1 < argc) repeat = std::atoi(argv[++i]);
    else if (a == "--verify-only") verify_only = true;
    else {
      std::fprintf(stderr, "usage: ram-bench [--factors N]... [--repeat R] [--verify-only]\n");
      return 2;
    }
  }
  if (sizes.empty()) sizes = {8, 10, 11};

#ifdef _OPENMP
  std::printf("# OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("# OpenMP not available, parallel mode runs the serial path\n");
#endif
  std::printf("%8s %10s %12s %12s %12s %8s %6s\n", "factors", "states", "transitions",
              "serial_ms", "parallel_ms", "speedup", "equal");

  for (int n : sizes) {
    CausalFactorModel m = product_model(n);
    RiskStructure serial, parallel;
    double ts = best_of(verify_only ? 1 : repeat, m, ComposeMode::Serial, serial);
    double tp = best_of(verify_only ? 1 : repeat, m, ComposeMode::Parallel, parallel);
    bool equal = serial == parallel;
    std::printf("%8d %10zu %12zu %12.2f %12.2f %8.2f %6s\n", n, serial.states.size(),
                serial.transitions.size(), ts, tp, ts / tp, equal ? "yes" : "NO");
    if (!equal) {
      std::fprintf(stderr, "mismatch between serial and parallel builders at n=%d\n", n);
      return 1;
    }
  }
  return 0;
}
