// Prints closed-form and brute-force norms of the two-sided power kernel
// (t - s)^{-gamma} s^{-alpha} on a few parameter sets.

#include "admlab/kernel.hpp"

#include <cstdio>
#include <limits>

int main() {
  using namespace admlab;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const KernelSpec specs[] = {
      {-1.0, -1.0, 1.0, 2.0}, {0.0, 0.0, 1.0, inf}, {0.2, 0.2, 2.0, 1.0},
      {0.25, 0.25, 2.0, inf}, {0.3, 0.3, 2.0, inf}, {-0.5, 0.3, 4.0, 10.0},
  };
  std::printf("%6s %6s %5s %6s  %-12s %14s %14s\n", "alpha", "gamma", "p", "tau", "class", "closed", "brute");
  for (const auto& k : specs) {
    const auto cls = classify(k);
    const auto b = norm_bruteforce(k);
    std::printf("%6.2f %6.2f %5.2f %6.2g  %-12s %14.10g %14.10g%s\n", k.alpha, k.gamma, k.p, k.tau, cls.tag().c_str(),
                norm_closed_form(k), b.value, b.divergent ? "  (diverges)" : "");
  }
  return 0;
}
