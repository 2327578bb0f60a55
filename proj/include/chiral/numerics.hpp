#pragma once

#include <functional>
#include <span>

namespace chiral {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

// Adaptive composite Simpson rule on [a, b]. Throws QuadratureFailure when the
// estimate does not settle to abs_tol within max_depth bisections.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 40);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = intercept + slope * x. Requires >= 2 distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace chiral
