#include "chiral/closed_form.hpp"

#include <cmath>
#include <stdexcept>

#include "chiral/error.hpp"

namespace chiral {

double DecayLaw::exponent(double t) const {
  switch (kind) {
    case DecayKind::None: return 0.0;
    case DecayKind::Exponential: return rate * t;
    case DecayKind::Stretched: return rate * std::pow(t, 3.0 / stretch_p);
  }
  return 0.0;
}

ActivityCurve ActivityCurve::from_activity(std::vector<double> times,
                                           std::span<const double> activity) {
  if (times.size() != activity.size()) {
    throw std::invalid_argument("ActivityCurve: times and activity differ in length");
  }
  std::vector<double> r(activity.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * (1.0 - activity[i]);
  return from_racemization(std::move(times), std::move(r));
}

ActivityCurve ActivityCurve::from_racemization(std::vector<double> times,
                                               std::vector<double> racemization) {
  if (times.size() != racemization.size()) {
    throw std::invalid_argument("ActivityCurve: times and racemization differ in length");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("ActivityCurve: times must ascend");
  }
  ActivityCurve out;
  out.times_ = std::move(times);
  out.racemization_ = std::move(racemization);
  out.activity_.resize(out.racemization_.size());
  for (std::size_t i = 0; i < out.activity_.size(); ++i) {
    out.activity_[i] = 1.0 - 2.0 * out.racemization_[i];
  }
  return out;
}

double activity_static(double delta_rate, double phi_rate, double t) {
  return std::cos(2.0 * (delta_rate + phi_rate) * t);
}

double activity_collisional(double delta_rate, const DecayLaw& law, double t) {
  return std::cos(2.0 * delta_rate * t) * std::exp(-law.exponent(t));
}

double amplitude_theta(WeakSplitting eps, double delta_rate, double phi_rate) {
  const double x = std::abs(delta_rate + phi_rate);
  const double e = std::abs(eps.eps_rate);
  const double scale = std::max(x, e);
  if (scale == 0.0) {
    throw Error(ErrorCode::Indeterminate, "Theta is 0/0 when eps = delta + phi = 0");
  }
  const double xs = x / scale;
  const double es = e / scale;
  return xs * xs / (es * es + xs * xs);
}

double activity_weak_static(WeakSplitting eps, double delta_rate, double phi_rate, double t) {
  const double coupling = delta_rate + phi_rate;
  if (eps.eps_rate == 0.0) return activity_static(delta_rate, phi_rate, t);
  const double theta = amplitude_theta(eps, delta_rate, phi_rate);
  const double big_phi = std::hypot(eps.eps_rate, coupling);
  return 1.0 - theta + theta * std::cos(2.0 * big_phi * t);
}

double activity_weak_collisional(WeakSplitting eps, double delta_rate, const DecayLaw& law,
                                 double t) {
  if (eps.eps_rate == 0.0) return activity_collisional(delta_rate, law, t);
  const double weight = amplitude_theta(eps, delta_rate, 0.0);
  const double delta0 = std::hypot(eps.eps_rate, delta_rate);
  return 1.0 - weight + weight * std::cos(2.0 * delta0 * t) * std::exp(-law.exponent(t));
}

double asymptotic_activity(WeakSplitting eps, double delta_rate) {
  if (eps.eps_rate == 0.0) return 0.0;
  return 1.0 - amplitude_theta(eps, delta_rate, 0.0);
}

std::vector<double> a_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("a_grid: bad range");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

namespace {

constexpr double kAMin = 1.0;
constexpr double kAMax = 7.0;

double theta_at(WeakSplitting eps, double A, const MolecularParams& params, const Constants& c,
                bool include_phi) {
  const MolecularParams at = params.with_A(A);
  const double delta = tunneling_delta(at, c);
  const double phi = include_phi ? phi_static(at, c) : 0.0;
  return amplitude_theta(eps, delta, phi);
}

}  // namespace

std::vector<ThetaPoint> theta_curve(WeakSplitting eps, std::span<const double> A_values,
                                    const MolecularParams& params, const Constants& c,
                                    bool include_phi) {
  std::vector<ThetaPoint> out;
  out.reserve(A_values.size());
  for (std::size_t i = 0; i < A_values.size(); ++i) {
    const double A = A_values[i];
    if (A < kAMin - 1e-12 || A > kAMax + 1e-12) {
      throw Error(ErrorCode::Config, "A must lie in [1, 7]");
    }
    if (i > 0 && !(A > A_values[i - 1])) throw Error(ErrorCode::Config, "A values must ascend");
    out.push_back({A, theta_at(eps, A, params, c, include_phi)});
  }
  return out;
}

double stability_threshold(WeakSplitting eps, const MolecularParams& params, const Constants& c,
                           double theta_target, bool include_phi) {
  // Theta(A) decreases with A (tunneling is exponentially suppressed).
  auto g = [&](double A) { return theta_at(eps, A, params, c, include_phi) - theta_target; };
  double lo = kAMin;
  double hi = kAMax;
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (!(g_lo > 0.0 && g_hi < 0.0)) {
    throw Error(ErrorCode::NoCrossing, "Theta does not cross the target inside A in [1, 7]");
  }
  while (hi - lo >= 1e-4 * 0.5) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g(mid);
    if (g_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace chiral
