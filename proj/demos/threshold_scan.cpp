// Sweeps the weight alpha for boundary observation and control of the Neumann
// heat equation and prints where the resolvent scans stay bounded.

#include "admlab/admissibility.hpp"

#include <cstdio>

int main() {
  using namespace admlab;
  const auto op = SpectralOperator::neumann_laplacian(4096, 1.0);
  const auto c = BoundaryOperator::observation(1.0, 0.0);
  const auto b = BoundaryOperator::control(1.0, 0.0);
  const double p = 2.0;
  std::printf("%7s %7s  %-18s %-18s\n", "alpha", "2a+2/p", "observation", "control");
  for (double alpha = -0.45; alpha < 0.5; alpha += 0.1) {
    const auto wc = scan_WC(op, c, p, alpha, 1);
    const auto wb = scan_WB(op, b, p, alpha, 1);
    std::printf("%7.2f %7.2f  %-18s %-18s\n", alpha, 2.0 * alpha + 2.0 / p, to_string(wc.verdict).c_str(),
                to_string(wb.verdict).c_str());
  }
  const auto r = scan_resolvent_norm(op, c, 1);
  std::printf("high-lambda slope of |C (lambda + A)^-1|: %.4f\n", r.slope_high);
  return 0;
}
