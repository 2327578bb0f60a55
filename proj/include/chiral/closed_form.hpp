#pragma once

// Analytic optical-activity laws. Every rate argument is an energy over hbar
// (s^-1); times are seconds. Activity O = 1 - 2 r, r the racemization.

#include <span>
#include <vector>

#include "chiral/params.hpp"

namespace chiral {

// eps/hbar, half the L-R energy difference. Only eps^2 enters the dynamics.
struct WeakSplitting {
  double eps_rate = 0.0;
};

enum class DecayKind { None, Exponential, Stretched };

struct DecayLaw {
  DecayKind kind = DecayKind::None;
  double rate = 0.0;   // s^-1, or s^-(3/p) when Stretched
  int stretch_p = 4;

  static DecayLaw none() { return {}; }
  static DecayLaw exponential(double rate) { return {DecayKind::Exponential, rate, 4}; }
  static DecayLaw stretched(double rate, int p) { return {DecayKind::Stretched, rate, p}; }

  // f(t) in exp(-f(t)).
  double exponent(double t) const;
};

class ActivityCurve {
 public:
  ActivityCurve() = default;
  // Stores r = (1 - O)/2 and then O = 1 - 2r, so the identity holds exactly.
  static ActivityCurve from_activity(std::vector<double> times, std::span<const double> activity);
  static ActivityCurve from_racemization(std::vector<double> times, std::vector<double> racemization);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& activity() const noexcept { return activity_; }
  const std::vector<double>& racemization() const noexcept { return racemization_; }
  std::size_t size() const noexcept { return times_.size(); }

 private:
  std::vector<double> times_;
  std::vector<double> activity_;
  std::vector<double> racemization_;
};

// cos(2 (delta + phi) t).
double activity_static(double delta_rate, double phi_rate, double t);

// cos(2 delta t) exp(-f(t)).
double activity_collisional(double delta_rate, const DecayLaw& law, double t);

// Theta = (delta+phi)^2 / (eps^2 + (delta+phi)^2), evaluated with the larger
// magnitude divided out. Throws Indeterminate when eps = delta + phi = 0.
double amplitude_theta(WeakSplitting eps, double delta_rate, double phi_rate);

// 1 - Theta + Theta cos(2 Phi t), Phi = sqrt(eps^2 + (delta+phi)^2).
double activity_weak_static(WeakSplitting eps, double delta_rate, double phi_rate, double t);

// 1 - (delta/D)^2 + (delta/D)^2 cos(2 D t) exp(-f(t)), D = sqrt(eps^2 + delta^2).
double activity_weak_collisional(WeakSplitting eps, double delta_rate, const DecayLaw& law,
                                 double t);

// Limit of activity_weak_collisional as f(t) -> infinity.
double asymptotic_activity(WeakSplitting eps, double delta_rate);

struct ThetaPoint {
  double A;
  double theta;
};

// Linear grid lo, lo+step, ..., hi (inclusive up to rounding).
std::vector<double> a_grid(double lo, double hi, double step);

// Theta(A) with delta and phi from the molecular formulas at omega = A 1e13.
// A values must ascend within [1, 7].
std::vector<ThetaPoint> theta_curve(WeakSplitting eps, std::span<const double> A_values,
                                    const MolecularParams& params, const Constants& c,
                                    bool include_phi = true);

// Bisection on [1, 7] for Theta(A*) = theta_target, to |dA| < 1e-4. Throws
// NoCrossing if the bracket does not straddle the target.
double stability_threshold(WeakSplitting eps, const MolecularParams& params, const Constants& c,
                           double theta_target = 0.5, bool include_phi = false);

}  // namespace chiral
