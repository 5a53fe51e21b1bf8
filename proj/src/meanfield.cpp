#include "mcpd/meanfield.hpp"

#include <cmath>
#include <stdexcept>

namespace mcpd {

namespace {

void check_domain(double rho, double b, int d) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("density must lie in [0, 1]");
  }
  if (!(b > 1.0)) {
    throw std::invalid_argument("temptation b must exceed 1");
  }
  if (d < 1) {
    throw std::invalid_argument("degree must be at least 1");
  }
}

}  // namespace

std::pair<double, double> mf_avg_payoffs(double rho, double b, int d) {
  check_domain(rho, b, d);
  const double dd = static_cast<double>(d);
  return {dd * rho, b * dd * rho};
}

double mf_derivative(double rho, double b, int d) {
  check_domain(rho, b, d);
  const double denom = 1.0 - rho + rho / b + 1.0 / (b * static_cast<double>(d));
  return -rho * (1.0 - rho) / denom;
}

double rk4_step(double rho, double h, double b, int d) {
  const double k1 = mf_derivative(rho, b, d);
  const double k2 = mf_derivative(rho + 0.5 * h * k1, b, d);
  const double k3 = mf_derivative(rho + 0.5 * h * k2, b, d);
  const double k4 = mf_derivative(rho + h * k3, b, d);
  return rho + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<MeanFieldState> mf_integrate(double rho0, double b, int d,
                                         double dt, int rounds) {
  check_domain(rho0, b, d);
  if (!(dt > 0.0) || rounds < 1) {
    throw std::invalid_argument("step must be positive and rounds >= 1");
  }
  const auto steps_per_round = static_cast<long long>(std::llround(1.0 / dt));
  if (steps_per_round < 1) {
    throw std::invalid_argument("step must not exceed one round");
  }
  const double h = 1.0 / static_cast<double>(steps_per_round);

  std::vector<MeanFieldState> series;
  series.reserve(static_cast<std::size_t>(rounds) + 1);
  double rho = rho0;
  series.push_back({0.0, rho});
  for (int t = 1; t <= rounds; ++t) {
    for (long long s = 0; s < steps_per_round; ++s) {
      rho = rk4_step(rho, h, b, d);
    }
    series.push_back({static_cast<double>(t), rho});
  }
  return series;
}

}  // namespace mcpd
