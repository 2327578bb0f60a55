#include "chiral/params.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "chiral/error.hpp"

namespace chiral {

Constants Constants::paper_compat() {
  return {"paper-compat", 1.0504e-27, 1.38e-16, 3.156e7, 3600.0};
}

Constants Constants::modern_cgs() {
  return {"modern-cgs", 1.0546e-27, 1.380649e-16, 3.1557e7, 3600.0};
}

Constants Constants::preset(std::string_view name) {
  if (name == "paper-compat") return paper_compat();
  if (name == "modern-cgs") return modern_cgs();
  throw Error(ErrorCode::Config, "unknown constants preset '" + std::string(name) + "'");
}

MolecularParams MolecularParams::with_A(double A) const {
  MolecularParams out = *this;
  out.omega = A * 1e13;
  return out;
}

MolecularParams MolecularParams::with_density(double N) const {
  MolecularParams out = *this;
  out.density_N = N;
  return out;
}

void MolecularParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::Config, std::string(name) + " must be positive and finite");
    }
  };
  positive(mu, "mu");
  positive(omega, "omega");
  positive(a, "a");
  positive(d, "d");
  positive(theta, "theta");
  positive(cavity_R, "R");
  if (!(density_N >= 0.0) || !std::isfinite(density_N)) {
    throw Error(ErrorCode::Config, "N must be non-negative and finite");
  }
  positive(temperature_T, "T");
  positive(collision_mass_m, "m");
  if (exponent_p < 4) throw Error(ErrorCode::Config, "p must be an integer >= 4");
  if (gamma) positive(*gamma, "gamma");
}

double barrier_action(const MolecularParams& params, const Constants& c) {
  return params.mu * params.omega * params.a * params.a / c.hbar;
}

double tunneling_delta(const MolecularParams& params, const Constants& c) {
  const double s = barrier_action(params, c);
  return params.omega / std::pow(std::numbers::pi, 1.5) * std::sqrt(s) * std::exp(-s);
}

double phi_static(const MolecularParams& params, const Constants& c) {
  const double r4 = std::pow(params.cavity_R, 4);
  return params.theta * params.d / (r4 * c.hbar) * std::exp(-barrier_action(params, c));
}

double gamma_coupling(const MolecularParams& params, const Constants& c,
                      std::optional<double> explicit_gamma) {
  if (explicit_gamma) return *explicit_gamma;
  if (params.gamma) return *params.gamma;
  if (params.exponent_p != 4) {
    throw Error(ErrorCode::MissingGamma, "p = " + std::to_string(params.exponent_p) +
                                             " needs an explicit gamma");
  }
  return params.d * params.theta * std::exp(-barrier_action(params, c));
}

RateEstimate lambda_impact(const MolecularParams& params, const Constants& c) {
  const int p = params.exponent_p;
  const double thermal = c.boltzmann * params.temperature_T / params.collision_mass_m;
  const double g = gamma_coupling(params, c);
  // For p = 4 this is 13.0 N (kT/m)^(1/6) (theta d / hbar)^(2/3) exp(-2S/3).
  const double scaling = std::pow(g / c.hbar, 2.0 / (p - 1)) * params.density_N *
                         std::pow(thermal, (p - 3.0) / (2.0 * p - 2.0));
  if (p == 4) return {13.0 * scaling, true};
  return {scaling, false};
}

double quasistatic_integral(int p) {
  if (p < 4) throw Error(ErrorCode::Config, "quasi-static integral needs p >= 4");
  using boost::math::quadrature::gauss_kronrod;
  const double q = (p + 3.0) / p;
  constexpr double kTol = 1e-8;
  double total_error = 0.0;

  // [0, 1] with x = y^p, which turns the x^(1-3/p) endpoint behaviour into the
  // polynomial p y^(2p-4).
  auto head = [p, q](double y) {
    if (y == 0.0) return 0.0;
    const double x = std::pow(y, p);
    const double s = std::sin(x);
    return p * std::pow(y, p - 1) * std::pow(x, -q) * s * s;
  };
  double err = 0.0;
  const double head_value = gauss_kronrod<double, 31>::integrate(head, 0.0, 1.0, 15, 1e-13, &err);
  total_error += err;

  // [1, inf): sin^2 = (1 - cos 2x)/2. The non-oscillatory half is exact; the
  // cosine half is integrated period by period out to X, then closed with the
  // integration-by-parts asymptotic series.
  constexpr int kPeriods = 400;
  const double X = 1.0 + kPeriods * std::numbers::pi;
  auto osc = [q](double x) { return std::pow(x, -q) * std::cos(2.0 * x); };
  double cos_part = 0.0;
  for (int k = 0; k < kPeriods; ++k) {
    const double lo = 1.0 + k * std::numbers::pi;
    cos_part += gauss_kronrod<double, 31>::integrate(osc, lo, lo + std::numbers::pi, 10, 1e-14, &err);
    total_error += err;
  }
  const double s2 = std::sin(2.0 * X);
  const double c2 = std::cos(2.0 * X);
  const double tail = -0.5 * s2 * std::pow(X, -q) + 0.25 * q * c2 * std::pow(X, -q - 1.0) +
                      0.125 * q * (q + 1.0) * s2 * std::pow(X, -q - 2.0);
  const double tail_bound = 0.0625 * q * (q + 1.0) * (q + 2.0) * std::pow(X, -q - 3.0);
  total_error += tail_bound;
  cos_part += tail;

  if (!(total_error < kTol) || !std::isfinite(head_value + cos_part)) {
    throw Error(ErrorCode::QuadratureFailure,
                "I_p error estimate " + std::to_string(total_error) + " exceeds 1e-8");
  }
  return head_value + 0.5 / (q - 1.0) - 0.5 * cos_part;
}

double lambda_quasistatic(const MolecularParams& params, const Constants& c) {
  const int p = params.exponent_p;
  const double g = gamma_coupling(params, c);
  if (p == 4) {
    return 2.86 * std::numbers::pi * params.density_N * std::pow(g / (2.0 * c.hbar), 0.75);
  }
  return (8.0 * std::numbers::pi / p) * params.density_N *
         std::pow(g / (2.0 * c.hbar), 3.0 / p) * quasistatic_integral(p);
}

double lambda_quasistatic_per_year(const MolecularParams& params, const Constants& c) {
  return unit_convert(lambda_quasistatic(params, c), RateUnit::PerSecondStretched,
                      RateUnit::PerYearStretched, c, params.exponent_p);
}

double lambda_quasistatic_per_year_linear(const MolecularParams& params, const Constants& c) {
  return lambda_quasistatic(params, c) * c.seconds_per_year;
}

DerivedRates derive_rates(const MolecularParams& params, const Constants& c) {
  DerivedRates out;
  out.barrier_action = barrier_action(params, c);
  out.delta_rate = tunneling_delta(params, c);
  out.phi_rate = phi_static(params, c);
  out.tau = out.delta_rate > 0.0 ? 1.0 / out.delta_rate : INFINITY;
  out.gamma = gamma_coupling(params, c);
  const RateEstimate li = lambda_impact(params, c);
  out.lambda_impact = li.value;
  out.lambda_impact_calibrated = li.calibrated;
  out.lambda_qs = lambda_quasistatic(params, c);
  return out;
}

namespace reference_fit {
double delta_rate(double A) { return 5.54e12 * std::pow(A, 1.5) * std::exp(-9.52 * A); }
double phi_rate(double A) { return 1.51e12 * std::exp(-9.52 * A); }
double lambda_per_year(double A) { return 5.03e15 * std::exp(-6.35 * A); }
double lambda_star_per_year34(double A) { return 2.90e12 * std::exp(-7.14 * A); }
}  // namespace reference_fit

// ---- units ---------------------------------------------------------------

RateUnit parse_rate_unit(std::string_view text) {
  if (text == "s^-1") return RateUnit::PerSecond;
  if (text == "h^-1") return RateUnit::PerHour;
  if (text == "y^-1") return RateUnit::PerYear;
  if (text == "s^-3/p") return RateUnit::PerSecondStretched;
  if (text == "y^-3/p") return RateUnit::PerYearStretched;
  throw Error(ErrorCode::Config, "unknown rate unit '" + std::string(text) + "'");
}

std::string_view to_string(RateUnit unit) {
  switch (unit) {
    case RateUnit::PerSecond: return "s^-1";
    case RateUnit::PerHour: return "h^-1";
    case RateUnit::PerYear: return "y^-1";
    case RateUnit::PerSecondStretched: return "s^-3/p";
    case RateUnit::PerYearStretched: return "y^-3/p";
  }
  return "?";
}

namespace {

bool is_stretched(RateUnit u) {
  return u == RateUnit::PerSecondStretched || u == RateUnit::PerYearStretched;
}

// Length of the unit's time base in seconds.
double time_base(RateUnit u, const Constants& c) {
  switch (u) {
    case RateUnit::PerSecond:
    case RateUnit::PerSecondStretched: return 1.0;
    case RateUnit::PerHour: return c.seconds_per_hour;
    case RateUnit::PerYear:
    case RateUnit::PerYearStretched: return c.seconds_per_year;
  }
  return 1.0;
}

}  // namespace

double unit_convert(double rate, RateUnit from, RateUnit to, const Constants& c, int stretch_p) {
  if (is_stretched(from) != is_stretched(to)) {
    throw Error(ErrorCode::DimensionMismatch, std::string("cannot convert ") +
                                                  std::string(to_string(from)) + " to " +
                                                  std::string(to_string(to)));
  }
  if (from == to) return rate;
  const double ratio = time_base(to, c) / time_base(from, c);
  if (is_stretched(from)) {
    if (stretch_p < 4) throw Error(ErrorCode::Config, "stretch exponent p must be >= 4");
    return rate * std::pow(ratio, 3.0 / stretch_p);
  }
  return rate * ratio;
}

}  // namespace chiral
