#include "mcpd/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mcpd/rng.hpp"

namespace mcpd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

int param_count(FitFamily family) {
  return family == FitFamily::Trig ? 4 : 3;
}

double eval(FitFamily family, const double* p, double x) {
  switch (family) {
    case FitFamily::PowerLaw: {
      const double gap = p[0] - x;
      return gap > 0.0 ? p[2] * std::pow(gap, p[1]) : 0.0;
    }
    case FitFamily::Quadratic:
      return (p[0] * x + p[1]) * x + p[2];
    case FitFamily::Trig:
      return p[0] * std::sin(p[1] * x + p[2]) + p[3];
  }
  throw std::logic_error("unreachable fit family");
}

double sum_squared_error(FitFamily family, const std::vector<double>& p,
                         const std::vector<double>& x,
                         const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = eval(family, p.data(), x[i]) - y[i];
    s += r * r;
  }
  return std::isfinite(s) ? s : kInf;
}

// Gaussian elimination with partial pivoting; false when near-singular.
bool solve3(double a[3][3], const double rhs[3], double out[3]) {
  double m[3][4];
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m[i][j] = a[i][j];
      scale = std::max(scale, std::fabs(a[i][j]));
    }
    m[i][3] = rhs[i];
  }
  if (scale == 0.0) return false;
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    }
    if (std::fabs(m[pivot][col]) < 1e-13 * scale) return false;
    if (pivot != col) std::swap(m[pivot], m[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
    }
  }
  for (int i = 2; i >= 0; --i) {
    double v = m[i][3];
    for (int j = i + 1; j < 3; ++j) v -= m[i][j] * out[j];
    out[i] = v / m[i][i];
  }
  return std::isfinite(out[0]) && std::isfinite(out[1]) &&
         std::isfinite(out[2]);
}

struct DataExtents {
  double xmin, xmax, xrange;
  double ymin, ymax, yamp, yabs;
};

DataExtents extents(const std::vector<double>& x, const std::vector<double>& y) {
  DataExtents e{};
  e.xmin = *std::min_element(x.begin(), x.end());
  e.xmax = *std::max_element(x.begin(), x.end());
  e.xrange = e.xmax - e.xmin;
  if (e.xrange <= 0.0) e.xrange = std::max(1.0, std::fabs(e.xmax));
  e.ymin = *std::min_element(y.begin(), y.end());
  e.ymax = *std::max_element(y.begin(), y.end());
  e.yamp = 0.5 * (e.ymax - e.ymin);
  if (e.yamp <= 0.0) e.yamp = 1.0;
  e.yabs = std::max({1e-12, std::fabs(e.ymin), std::fabs(e.ymax)});
  return e;
}

// Least-squares scale for fixed (b_cr, beta): argmin_s sum(s*w - y)^2.
bool power_scale(const std::vector<double>& x, const std::vector<double>& y,
                 double b_cr, double beta, double* out) {
  double sw2 = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double gap = b_cr - x[i];
    if (gap <= 0.0) continue;
    const double w = std::pow(gap, beta);
    sw2 += w * w;
    swy += w * y[i];
  }
  if (!(sw2 > 0.0) || !std::isfinite(sw2) || !std::isfinite(swy)) return false;
  *out = swy / sw2;
  return std::isfinite(*out);
}

// Linear solve of y ~ p*sin(wx) + q*cos(wx) + c, repackaged as
// A*sin(wx + phi) + offset.
bool trig_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                     double omega, std::vector<double>* out) {
  double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = std::sin(omega * x[i]);
    const double c = std::cos(omega * x[i]);
    const double base[3] = {s, c, 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int j = 0; j < 3; ++j) a[r][j] += base[r] * base[j];
      rhs[r] += base[r] * y[i];
    }
  }
  double pqc[3];
  if (!solve3(a, rhs, pqc)) return false;
  const double amp = std::hypot(pqc[0], pqc[1]);
  *out = {amp, omega, std::atan2(pqc[1], pqc[0]), pqc[2]};
  return true;
}

std::vector<std::vector<double>> structured_starts(
    FitFamily family, const std::vector<double>& x,
    const std::vector<double>& y, const DataExtents& e) {
  std::vector<std::vector<double>> starts;
  switch (family) {
    case FitFamily::Quadratic: {
      double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
      double rhs[3] = {0, 0, 0};
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double base[3] = {x[i] * x[i], x[i], 1.0};
        for (int r = 0; r < 3; ++r) {
          for (int j = 0; j < 3; ++j) a[r][j] += base[r] * base[j];
          rhs[r] += base[r] * y[i];
        }
      }
      double abc[3];
      if (solve3(a, rhs, abc)) starts.push_back({abc[0], abc[1], abc[2]});
      starts.push_back({-2.7363, 4.8644, -1.7205});
      break;
    }
    case FitFamily::Trig: {
      for (double cycles = 0.25; cycles <= 8.0; cycles += 0.25) {
        const double omega = 2.0 * kPi * cycles / e.xrange;
        std::vector<double> p;
        if (trig_linear_fit(x, y, omega, &p)) starts.push_back(std::move(p));
      }
      starts.push_back({-0.2568, 7.2462, -2.5603, 0.1314});
      break;
    }
    case FitFamily::PowerLaw: {
      for (int i = 0; i < 24; ++i) {
        const double b_cr = e.xmin + (0.05 + 1.55 * i / 23.0) * e.xrange;
        for (const double beta :
             {0.3, 0.5, 0.8, 0.923, 1.0, 1.3, 1.7, 2.2, 3.0}) {
          double scale;
          if (power_scale(x, y, b_cr, beta, &scale)) {
            starts.push_back({b_cr, beta, scale});
          }
        }
      }
      double scale;
      if (power_scale(x, y, 1.31, 0.923, &scale)) {
        starts.push_back({1.31, 0.923, scale});
      }
      break;
    }
  }
  return starts;
}

std::vector<double> random_start(FitFamily family, const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 const DataExtents& e, std::uint64_t seed,
                                 std::uint64_t* counter) {
  auto u = [&] { return rng::unit_at(seed, (*counter)++); };
  switch (family) {
    case FitFamily::Quadratic: {
      const double sa = 10.0 * e.yabs / (e.xrange * e.xrange);
      const double sb = 10.0 * e.yabs / e.xrange;
      return {sa * (2.0 * u() - 1.0), sb * (2.0 * u() - 1.0),
              e.ymin + (e.ymax - e.ymin) * u() + e.yamp * (2.0 * u() - 1.0)};
    }
    case FitFamily::Trig: {
      const double omega = 0.5 + (20.0 * kPi / e.xrange - 0.5) * u();
      return {2.0 * e.yamp * u(), omega, 2.0 * kPi * u(),
              e.ymin + (e.ymax - e.ymin) * u()};
    }
    case FitFamily::PowerLaw: {
      const double b_cr = e.xmin + 0.1 * e.xrange + 1.4 * e.xrange * u();
      const double beta = 0.2 + 2.8 * u();
      double scale;
      if (!power_scale(x, y, b_cr, beta, &scale)) {
        scale = e.yabs * (0.1 + 2.0 * u());
      }
      return {b_cr, beta, scale};
    }
  }
  throw std::logic_error("unreachable fit family");
}

struct Candidate {
  std::vector<double> p;
  double f;
};

Candidate nelder_mead(FitFamily family, const std::vector<double>& x,
                      const std::vector<double>& y, std::vector<double> start,
                      int max_evals) {
  const int n = static_cast<int>(start.size());
  auto objective = [&](const std::vector<double>& p) {
    return sum_squared_error(family, p, x, y);
  };

  std::vector<Candidate> simplex;
  simplex.reserve(n + 1);
  simplex.push_back({start, objective(start)});
  for (int k = 0; k < n; ++k) {
    auto p = start;
    p[k] += p[k] != 0.0 ? 0.05 * std::fabs(p[k]) : 0.01;
    simplex.push_back({p, objective(p)});
  }
  int evals = n + 1;
  auto by_f = [](const Candidate& a, const Candidate& b) { return a.f < b.f; };
  std::sort(simplex.begin(), simplex.end(), by_f);

  while (evals < max_evals) {
    const double fb = simplex.front().f;
    const double fw = simplex.back().f;
    if (fw - fb <= 1e-15 * (1.0 + std::fabs(fb))) {
      double spread = 0.0, size = 0.0;
      for (int k = 0; k < n; ++k) {
        double lo = kInf, hi = -kInf;
        for (const auto& c : simplex) {
          lo = std::min(lo, c.p[k]);
          hi = std::max(hi, c.p[k]);
          size = std::max(size, std::fabs(c.p[k]));
        }
        spread = std::max(spread, hi - lo);
      }
      if (spread <= 1e-11 * (1.0 + size)) break;
    }

    std::vector<double> centroid(n, 0.0);
    for (int v = 0; v < n; ++v) {
      for (int k = 0; k < n; ++k) centroid[k] += simplex[v].p[k];
    }
    for (int k = 0; k < n; ++k) centroid[k] /= n;
    const auto& worst = simplex.back();

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (int k = 0; k < n; ++k) {
        p[k] = centroid[k] + coef * (centroid[k] - worst.p[k]);
      }
      return p;
    };

    auto reflected = blend(1.0);
    const double fr = objective(reflected);
    ++evals;
    bool shrink = false;
    if (fr < simplex.front().f) {
      auto expanded = blend(2.0);
      const double fe = objective(expanded);
      ++evals;
      if (fe < fr) {
        simplex.back() = {std::move(expanded), fe};
      } else {
        simplex.back() = {std::move(reflected), fr};
      }
    } else if (fr < simplex[n - 1].f) {
      simplex.back() = {std::move(reflected), fr};
    } else if (fr < worst.f) {
      auto outside = blend(0.5);
      const double fo = objective(outside);
      ++evals;
      if (fo <= fr) {
        simplex.back() = {std::move(outside), fo};
      } else {
        shrink = true;
      }
    } else {
      auto inside = blend(-0.5);
      const double fi = objective(inside);
      ++evals;
      if (fi < worst.f) {
        simplex.back() = {std::move(inside), fi};
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (int v = 1; v <= n; ++v) {
        for (int k = 0; k < n; ++k) {
          simplex[v].p[k] =
              simplex[0].p[k] + 0.5 * (simplex[v].p[k] - simplex[0].p[k]);
        }
        simplex[v].f = objective(simplex[v].p);
      }
      evals += n;
    }
    std::sort(simplex.begin(), simplex.end(), by_f);
  }
  return simplex.front();
}

Candidate polish(FitFamily family, const std::vector<double>& x,
                 const std::vector<double>& y, std::vector<double> start) {
  const int n = static_cast<int>(start.size());
  Candidate best = nelder_mead(family, x, y, std::move(start), 400 * n);
  for (int round = 0; round < 3; ++round) {
    Candidate again = nelder_mead(family, x, y, best.p, 400 * n);
    if (again.f >= best.f * (1.0 - 1e-14) - 1e-300) {
      if (again.f < best.f) best = std::move(again);
      break;
    }
    best = std::move(again);
  }
  return best;
}

}  // namespace

FitFamily family_from_string(const std::string& name) {
  if (name == "power") return FitFamily::PowerLaw;
  if (name == "quadratic") return FitFamily::Quadratic;
  if (name == "trig") return FitFamily::Trig;
  throw std::invalid_argument("unknown fit family '" + name +
                              "' (expected power, quadratic, or trig)");
}

std::string to_string(FitFamily family) {
  switch (family) {
    case FitFamily::PowerLaw:
      return "power";
    case FitFamily::Quadratic:
      return "quadratic";
    case FitFamily::Trig:
      return "trig";
  }
  throw std::logic_error("unreachable fit family");
}

double evaluate_model(const FitModel& model, double x) {
  if (static_cast<int>(model.params.size()) != param_count(model.family)) {
    throw std::invalid_argument("parameter count does not match family");
  }
  return eval(model.family, model.params.data(), x);
}

std::vector<double> evaluate_model(const FitModel& model,
                                   const std::vector<double>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const double x : xs) out.push_back(evaluate_model(model, x));
  return out;
}

double rmse(const std::vector<double>& y, const std::vector<double>& yhat) {
  if (y.size() != yhat.size() || y.empty()) {
    throw std::invalid_argument("rmse needs equal nonzero lengths");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

double goodness_of_fit(const std::vector<double>& y,
                       const std::vector<double>& yhat) {
  if (y.size() != yhat.size() || y.empty()) {
    throw std::invalid_argument("goodness needs equal nonzero lengths");
  }
  double se = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    se += r * r;
    sy += y[i] * y[i];
  }
  if (sy == 0.0) {
    throw std::domain_error("goodness undefined for all-zero reference data");
  }
  return 1.0 - std::sqrt(se / sy);
}

FitModel canonicalize(const FitModel& model) {
  if (static_cast<int>(model.params.size()) != param_count(model.family)) {
    throw std::invalid_argument("parameter count does not match family");
  }
  if (model.family != FitFamily::Trig) return model;
  double amp = model.params[0];
  double omega = model.params[1];
  double phi = model.params[2];
  const double offset = model.params[3];
  if (omega < 0.0) {
    omega = -omega;
    phi = -phi;
    amp = -amp;
  }
  if (amp < 0.0) {
    amp = -amp;
    phi += kPi;
  }
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  return {FitFamily::Trig, {amp, omega, phi, offset}};
}

FitResult fit_model(FitFamily family, const std::vector<double>& x,
                    const std::vector<double>& y, int starts,
                    std::uint64_t seed) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("x and y lengths differ");
  }
  const int n = param_count(family);
  if (static_cast<int>(x.size()) < n + 1) {
    throw std::invalid_argument("need at least " + std::to_string(n + 1) +
                                " data points for " + to_string(family));
  }
  if (starts < 0) {
    throw std::invalid_argument("start count must be non-negative");
  }

  const DataExtents e = extents(x, y);
  auto start_list = structured_starts(family, x, y, e);
  std::uint64_t counter = 0;
  for (int k = 0; k < starts; ++k) {
    start_list.push_back(random_start(family, x, y, e, seed, &counter));
  }

  bool found = false;
  Candidate best{{}, kInf};
  for (auto& start : start_list) {
    if (!std::isfinite(sum_squared_error(family, start, x, y))) continue;
    Candidate c = polish(family, x, y, std::move(start));
    if (!std::isfinite(c.f)) continue;
    if (!found || c.f < best.f) {
      best = std::move(c);
      found = true;
    }
  }
  if (!found) {
    throw std::runtime_error("fit failed for " + to_string(family) + ": all " +
                             std::to_string(start_list.size()) +
                             " starts produced non-finite objectives");
  }

  FitResult result;
  result.model = canonicalize({family, best.p});
  const auto yhat = evaluate_model(result.model, x);
  result.rmse = rmse(y, yhat);
  double sy = 0.0;
  for (const double v : y) sy += v * v;
  result.goodness = sy > 0.0 ? goodness_of_fit(y, yhat)
                             : std::numeric_limits<double>::quiet_NaN();
  return result;
}

std::vector<FitResult> compare_fits(const std::vector<double>& x,
                                    const std::vector<double>& y, int starts,
                                    std::uint64_t seed) {
  std::vector<FitResult> out;
  std::string failures;
  for (const FitFamily family :
       {FitFamily::PowerLaw, FitFamily::Quadratic, FitFamily::Trig}) {
    try {
      out.push_back(fit_model(family, x, y, starts, seed));
    } catch (const std::exception& ex) {
      failures += to_string(family) + ": " + ex.what() + "; ";
    }
  }
  if (out.empty()) {
    throw std::runtime_error("every family failed to fit: " + failures);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FitResult& a, const FitResult& b) {
                     return a.rmse < b.rmse;
                   });
  return out;
}

}  // namespace mcpd
