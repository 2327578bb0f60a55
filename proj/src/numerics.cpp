#include "chiral/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include "chiral/error.hpp"

namespace chiral {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::MissingGamma: return "MissingGamma";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::Indeterminate: return "Indeterminate";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ShellTooSmall: return "ShellTooSmall";
    case ErrorCode::InsufficientDecay: return "InsufficientDecay";
  }
  return "UnknownError";
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

namespace {

struct SimpsonPanel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// At the depth limit a panel is still accepted if its error estimate is within
// the caller's overall tolerance; this lets jump discontinuities (pulse edges)
// converge, since the panel straddling a jump shrinks geometrically.
double refine(const std::function<double(double)>& f, const SimpsonPanel& p, double tol,
              double overall_tol, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm)) {
    throw Error(ErrorCode::QuadratureFailure, "integrand is not finite");
  }
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  if (std::abs(delta) <= 15.0 * tol || (depth <= 0 && std::abs(delta) <= overall_tol)) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    throw Error(ErrorCode::QuadratureFailure,
                "adaptive Simpson did not converge on [" + std::to_string(p.a) + ", " +
                    std::to_string(p.b) + "]");
  }
  return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, overall_tol, depth - 1) +
         refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, overall_tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
    throw Error(ErrorCode::QuadratureFailure, "integrand is not finite");
  }
  const SimpsonPanel whole{a, m, b, fa, fm, fb, simpson(a, b, fa, fm, fb)};
  return refine(f, whole, abs_tol, abs_tol, max_depth);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line needs two or more paired samples");
  }
  const double n = static_cast<double>(x.size());
  const double mx = compensated_sum(x) / n;
  const double my = compensated_sum(y) / n;
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (sxx.value() <= 0.0) {
    throw std::invalid_argument("fit_line needs distinct abscissae");
  }
  LineFit out;
  out.slope = sxy.value() / sxx.value();
  out.intercept = my - out.slope * mx;
  if (syy.value() > 0.0) {
    out.r_squared = sxy.value() * sxy.value() / (sxx.value() * syy.value());
  } else {
    out.r_squared = 1.0;
  }
  return out;
}

}  // namespace chiral
