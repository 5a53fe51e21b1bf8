#pragma once

#include <utility>
#include <vector>

namespace mcpd {

struct MeanFieldState {
  double t;
  double rho;
};

// Well-mixed average returns at cooperator density rho: a cooperator earns
// d*rho, a defector b*d*rho.
std::pair<double, double> mf_avg_payoffs(double rho, double b, int d);

// d(rho)/dt of the well-mixed dynamics:
//   -rho(1-rho) / (1 - rho + rho/b + 1/(b*d))
// Nonpositive on [0, 1] for b > 1, with fixed points at 0 and 1.
double mf_derivative(double rho, double b, int d);

// One classical Runge-Kutta step of size h from density rho.
double rk4_step(double rho, double h, double b, int d);

// Integrates the density from rho0 over `rounds` unit time intervals,
// sampling at integer rounds (result has rounds+1 entries, t = 0..rounds).
// dt is snapped to the nearest exact divisor of one round.
std::vector<MeanFieldState> mf_integrate(double rho0, double b, int d,
                                         double dt = 0.01, int rounds = 1000);

}  // namespace mcpd
