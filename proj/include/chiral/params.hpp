#pragma once

// Physical constants, molecular parameters and the derived rate laws of the
// double-well racemization model. CGS-Gaussian units throughout. Energies that
// appear as rates are stored divided by hbar (rad/s).

#include <optional>
#include <string>
#include <string_view>

namespace chiral {

struct Constants {
  std::string name;
  double hbar;              // erg s
  double boltzmann;         // erg/K
  double seconds_per_year;  // s
  double seconds_per_hour;  // s

  // hbar = 1.0504e-27: 1.05e-27 to the precision implied by a 9.520 barrier
  // action per 1e13 rad/s at the standard parameters. Default for reproduction.
  static Constants paper_compat();
  static Constants modern_cgs();
  // Throws Error(Config) for any name other than "paper-compat" or "modern-cgs".
  static Constants preset(std::string_view name);
};

struct MolecularParams {
  double mu = 1e-23;                // reduced vibrational mass, g
  double omega = 4.3e13;            // vibration angular frequency, rad/s
  double a = 1e-8;                  // well half-separation, cm
  double d = 1e-18;                 // perturber dipole, esu cm
  double theta = 1e-26;             // quadrupole L-R matrix scale, esu cm^2
  double cavity_R = 5e-8;           // mean intermolecular distance, cm
  double density_N = 1e17;          // perturber density, cm^-3
  double temperature_T = 300.0;     // K
  double collision_mass_m = 1e-22;  // colliding-pair reduced mass, g
  int exponent_p = 4;               // interaction power law gamma / R^p
  std::optional<double> gamma;      // explicit coupling constant, erg cm^p

  // omega in units of 1e13 rad/s.
  double A() const noexcept { return omega / 1e13; }
  MolecularParams with_A(double A) const;
  MolecularParams with_density(double N) const;

  // Throws Error(Config) naming the first offending field.
  void validate() const;

  // Standard parameter set (A = 4.3). Same as a default-constructed value.
  static MolecularParams standard() { return {}; }
};

struct RateEstimate {
  double value = 0.0;
  // False when no kinetic coefficient is known for the exponent and the value
  // is the bare scaling-law estimate.
  bool calibrated = true;
};

struct DerivedRates {
  double delta_rate = 0.0;      // delta / hbar, s^-1
  double phi_rate = 0.0;        // phi / hbar, s^-1
  double lambda_impact = 0.0;   // s^-1
  double lambda_qs = 0.0;       // s^-(3/p)
  double tau = 0.0;             // hbar / delta, s
  double gamma = 0.0;           // erg cm^p
  double barrier_action = 0.0;  // mu omega a^2 / hbar
  bool lambda_impact_calibrated = true;
};

double barrier_action(const MolecularParams& params, const Constants& c);

// delta/hbar = (omega / pi^(3/2)) sqrt(S) exp(-S), S the barrier action.
double tunneling_delta(const MolecularParams& params, const Constants& c);

// Static mean-field coupling phi/hbar = theta d / (R^4 hbar) exp(-S).
double phi_static(const MolecularParams& params, const Constants& c);

// Coupling constant of the gamma / R^p collision potential. For p = 4 it is
// d theta exp(-S); any other exponent needs an explicit value (params.gamma or
// the override) or throws MissingGamma.
double gamma_coupling(const MolecularParams& params, const Constants& c,
                      std::optional<double> explicit_gamma = std::nullopt);

// Impact-regime decay rate in s^-1. p = 4 uses the calibrated coefficient 13.0;
// other p return the coefficient-free scaling law with calibrated = false.
RateEstimate lambda_impact(const MolecularParams& params, const Constants& c);

// I_p = integral_0^inf x^-(p+3)/p sin^2 x dx, by quadrature split at x = 1.
double quasistatic_integral(int p);

// Quasi-static stretched decay constant in s^-(3/p). p = 4 uses 2.86 pi.
double lambda_quasistatic(const MolecularParams& params, const Constants& c);

// lambda_quasistatic expressed per year^(3/p) with the matching 3/p power of
// the year length.
double lambda_quasistatic_per_year(const MolecularParams& params, const Constants& c);

// Same rate converted with the first power of the year length. This is the
// convention behind the commonly quoted 2.90e12 exp(-7.14 A) prefactor; kept
// only for side-by-side reporting.
double lambda_quasistatic_per_year_linear(const MolecularParams& params, const Constants& c);

DerivedRates derive_rates(const MolecularParams& params, const Constants& c);

// Reference fits in terms of A, s^-1 (or y^-1 / y^-3/4 where named).
namespace reference_fit {
double delta_rate(double A);             // 5.54e12 A^1.5 exp(-9.52 A)
double phi_rate(double A);               // 1.51e12 exp(-9.52 A)
double lambda_per_year(double A);        // 5.03e15 exp(-6.35 A)
double lambda_star_per_year34(double A); // 2.90e12 exp(-7.14 A)
}  // namespace reference_fit

// ---- units ---------------------------------------------------------------

enum class RateUnit { PerSecond, PerHour, PerYear, PerSecondStretched, PerYearStretched };

RateUnit parse_rate_unit(std::string_view text);
std::string_view to_string(RateUnit unit);

// Exact multiplicative conversion. Stretched units (time^-3/p) use the 3/p
// power of the time factor. Mixing plain and stretched units throws
// DimensionMismatch.
double unit_convert(double rate, RateUnit from, RateUnit to, const Constants& c,
                    int stretch_p = 4);

}  // namespace chiral
