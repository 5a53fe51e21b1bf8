#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mcpd {

enum class FitFamily { PowerLaw, Quadratic, Trig };

FitFamily family_from_string(const std::string& name);
std::string to_string(FitFamily family);

// A fitted curve. Parameter layout by family:
//   PowerLaw:  {b_cr, beta, scale}    y = scale*(b_cr - x)^beta for x < b_cr,
//                                     else 0
//   Quadratic: {a, b, c}              y = a*x^2 + b*x + c
//   Trig:      {A, omega, phi, offset} y = A*sin(omega*x + phi) + offset
struct FitModel {
  FitFamily family;
  std::vector<double> params;
};

double evaluate_model(const FitModel& model, double x);
std::vector<double> evaluate_model(const FitModel& model,
                                   const std::vector<double>& xs);

// sqrt of the mean squared residual.
double rmse(const std::vector<double>& y, const std::vector<double>& yhat);

// 1 - sqrt(sum((y-yhat)^2) / sum(y^2)); requires sum(y^2) > 0.
double goodness_of_fit(const std::vector<double>& y,
                       const std::vector<double>& yhat);

struct FitResult {
  FitModel model;
  double rmse = 0.0;
  double goodness = 0.0;  // NaN when sum(y^2) = 0
};

// Resolves sine-identity ambiguity: amplitude > 0, phase in [0, 2pi),
// frequency > 0. Other families pass through unchanged.
FitModel canonicalize(const FitModel& model);

// Least-squares fit by multi-start Nelder-Mead simplex descent: family
// specific structured starts (closed forms and coarse grids) plus `starts`
// seeded random starts. Deterministic for a fixed seed. Throws on fewer
// data points than parameters + 1, and when every start diverges.
FitResult fit_model(FitFamily family, const std::vector<double>& x,
                    const std::vector<double>& y, int starts = 50,
                    std::uint64_t seed = 1);

// All three families, ordered by ascending RMSE.
std::vector<FitResult> compare_fits(const std::vector<double>& x,
                                    const std::vector<double>& y,
                                    int starts = 50, std::uint64_t seed = 1);

}  // namespace mcpd
