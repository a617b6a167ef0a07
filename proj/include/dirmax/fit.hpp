#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dirmax {

// Least-squares line y = slope x + intercept on the stored (possibly
// log-transformed) coordinates, plus an optional pass/fail against a target.
struct FitReport {
  std::string x_label = "x";
  std::string y_label = "y";
  std::vector<double> xs;
  std::vector<double> ys;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double r_squared = 0.0;
  std::optional<double> target;
  double tolerance = 0.0;
  bool pass = true;

  // Sets target and tolerance and recomputes pass = |slope - target| <= tolerance.
  void judge(double target_slope, double tol);
};

// OLS on (xs, ys) as given. Needs >= 2 points and non-constant xs.
FitReport fit_linear(const std::vector<double>& xs, const std::vector<double>& ys);
// OLS on (log x, log y). Needs >= 3 points, distinct positive xs and positive ys.
FitReport fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace dirmax
