#include "chiral/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chiral/error.hpp"
#include "chiral/numerics.hpp"

namespace chiral {

double DriveSpec::spectral_bound(double t) const {
  return std::abs(E0_rate + u(t)) + std::hypot(eps_rate, delta_rate + phi(t));
}

double default_step(const DriveSpec& drive, double t) {
  const double omega = drive.spectral_bound(t);
  if (!(omega > 0.0)) throw std::invalid_argument("default_step: drive has no dynamics");
  return 2.0 * std::numbers::pi / omega / 1000.0;
}

namespace {

struct Derivative {
  Complex dL, dR;
};

// Right-hand side in scaled time: rates are divided by omega_scale.
Derivative rhs(const DriveSpec& drive, double t, double inv_scale, Complex aL, Complex aR) {
  const double common = (drive.E0_rate + drive.u(t)) * inv_scale;
  const double eps = drive.eps_rate * inv_scale;
  const double coupling = (drive.delta_rate + drive.phi(t)) * inv_scale;
  constexpr Complex minus_i{0.0, -1.0};
  return {minus_i * ((common - eps) * aL + coupling * aR),
          minus_i * ((common + eps) * aR + coupling * aL)};
}

}  // namespace

Trajectory integrate(const ChiralState& initial, const DriveSpec& drive, double t0, double t1,
                     double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 must not precede t0");
  const double span = t1 - t0;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
  const double h = span / static_cast<double>(steps);

  double scale = drive.spectral_bound(t0);
  if (!(scale > 0.0)) scale = span > 0.0 ? 1.0 / span : 1.0;
  const double inv_scale = 1.0 / scale;
  const double hs = h * scale;

  Trajectory out;
  out.times.reserve(steps + 1);
  out.states.reserve(steps + 1);
  out.times.push_back(t0);
  out.states.push_back(initial);
  double drift = std::abs(initial.norm() - 1.0);

  Complex aL = initial.amp_L;
  Complex aR = initial.amp_R;
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = t0 + static_cast<double>(n) * h;
    if (h * drive.spectral_bound(t) >= 0.1) {
      throw Error(ErrorCode::StepTooLarge,
                  "dt * |H| = " + std::to_string(h * drive.spectral_bound(t)) + " at t = " +
                      std::to_string(t) + " (must stay below 0.1)");
    }
    const double tm = t + 0.5 * h;
    const double te = t0 + static_cast<double>(n + 1) * h;
    const Derivative k1 = rhs(drive, t, inv_scale, aL, aR);
    const Derivative k2 = rhs(drive, tm, inv_scale, aL + 0.5 * hs * k1.dL, aR + 0.5 * hs * k1.dR);
    const Derivative k3 = rhs(drive, tm, inv_scale, aL + 0.5 * hs * k2.dL, aR + 0.5 * hs * k2.dR);
    const Derivative k4 = rhs(drive, te, inv_scale, aL + hs * k3.dL, aR + hs * k3.dR);
    aL += hs / 6.0 * (k1.dL + 2.0 * k2.dL + 2.0 * k3.dL + k4.dL);
    aR += hs / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR);
    out.times.push_back(te);
    out.states.push_back({aL, aR});
    drift = std::max(drift, std::abs(std::norm(aL) + std::norm(aR) - 1.0));
  }
  out.norm_drift = drift;
  return out;
}

ChiralState propagate_constant(const ChiralState& initial, double E_rate, double eps_rate,
                               double coupling_rate, double t) {
  // exp(-i H t) with H = E I - eps sigma_z + coupling sigma_x
  //   = exp(-i E t) [cos(D t) I - i sin(D t)/D (-eps sigma_z + coupling sigma_x)].
  const double big_delta = std::hypot(eps_rate, coupling_rate);
  const double c = std::cos(big_delta * t);
  // sin(D t)/D, continuous at D = 0.
  const double sinc_t = big_delta > 0.0 ? std::sin(big_delta * t) / big_delta : t;
  const Complex phase = std::polar(1.0, -E_rate * t);
  constexpr Complex i{0.0, 1.0};
  const Complex aL = (c + i * sinc_t * eps_rate) * initial.amp_L - i * sinc_t * coupling_rate * initial.amp_R;
  const Complex aR = -i * sinc_t * coupling_rate * initial.amp_L + (c - i * sinc_t * eps_rate) * initial.amp_R;
  return {phase * aL, phase * aR};
}

Trajectory evolve_phase_integral(const ChiralState& initial, double delta_rate,
                                 const RateFunction& phi_of_t, std::span<const double> t_grid) {
  Trajectory out;
  out.times.assign(t_grid.begin(), t_grid.end());
  out.states.reserve(t_grid.size());
  CompensatedSum phi_area;
  double t_prev = 0.0;
  double drift = 0.0;
  for (double t : t_grid) {
    if (t < t_prev) throw std::invalid_argument("evolve_phase_integral: grid must ascend from 0");
    if (phi_of_t && t > t_prev) phi_area.add(adaptive_simpson(phi_of_t, t_prev, t, 1e-10));
    t_prev = t;
    const double theta = delta_rate * t + phi_area.value();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    constexpr Complex i{0.0, 1.0};
    const ChiralState state{c * initial.amp_L - i * s * initial.amp_R,
                            -i * s * initial.amp_L + c * initial.amp_R};
    drift = std::max(drift, std::abs(state.norm() - 1.0));
    out.states.push_back(state);
  }
  out.norm_drift = drift;
  return out;
}

ChiralState apply_kick(const ChiralState& state, double kick) {
  const double c = std::cos(kick);
  const double s = std::sin(kick);
  constexpr Complex i{0.0, 1.0};
  return {c * state.amp_L - i * s * state.amp_R, -i * s * state.amp_L + c * state.amp_R};
}

double racemization_of(const ChiralState& state) { return std::norm(state.amp_R); }

BlochVector bloch_of(const ChiralState& state) {
  const Complex lr = state.amp_L * std::conj(state.amp_R);
  return {2.0 * lr.real(), 2.0 * lr.imag(), std::norm(state.amp_L) - std::norm(state.amp_R)};
}

}  // namespace chiral
