#pragma once

// Two-level amplitude dynamics in the {|L>, |R>} basis:
//
//   i da_L/dt = (E0 - eps + u(t)) a_L + (delta + phi(t)) a_R
//   i da_R/dt = (E0 + eps + u(t)) a_R + (delta + phi(t)) a_L
//
// with every energy given as a rate (energy / hbar, s^-1).

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace chiral {

using Complex = std::complex<double>;
using RateFunction = std::function<double(double)>;

struct ChiralState {
  Complex amp_L{1.0, 0.0};
  Complex amp_R{0.0, 0.0};

  static ChiralState left() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static ChiralState right() { return {{0.0, 0.0}, {1.0, 0.0}}; }
  double norm() const noexcept { return std::norm(amp_L) + std::norm(amp_R); }
};

struct DriveSpec {
  double E0_rate = 0.0;
  double eps_rate = 0.0;
  double delta_rate = 0.0;
  RateFunction u_of_t;    // empty means u = 0
  RateFunction phi_of_t;  // empty means phi = 0

  double u(double t) const { return u_of_t ? u_of_t(t) : 0.0; }
  double phi(double t) const { return phi_of_t ? phi_of_t(t) : 0.0; }
  // Upper bound on the instantaneous Hamiltonian eigenvalue magnitude.
  double spectral_bound(double t) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ChiralState> states;
  double norm_drift = 0.0;  // max |norm - 1| over the stored states
};

// Step of 1/1000 of the amplitude period 2 pi / Omega, Omega the spectral
// bound at t. Keeps RK4 norm loss below 1e-9 per 1e5 steps.
double default_step(const DriveSpec& drive, double t);

// Classical fixed-step RK4 from t0 to t1 with step at most dt (the step count
// is rounded up so the end point is hit exactly). Internally works in the
// dimensionless time s = Omega t. Throws StepTooLarge when dt times the
// spectral bound reaches 0.1 at any step.
Trajectory integrate(const ChiralState& initial, const DriveSpec& drive, double t0, double t1,
                     double dt);

// Exact propagator for constant couplings: E the common diagonal rate,
// coupling = delta + phi.
ChiralState propagate_constant(const ChiralState& initial, double E_rate, double eps_rate,
                               double coupling_rate, double t);

// eps = 0 evolution through the accumulated tunneling phase
// theta_LR(t) = delta t + integral_0^t phi; the integral uses adaptive
// composite Simpson to 1e-10 per grid interval. The common diagonal phase is
// dropped.
Trajectory evolve_phase_integral(const ChiralState& initial, double delta_rate,
                                 const RateFunction& phi_of_t, std::span<const double> t_grid);

// Impulsive off-diagonal kick: exp(-i kick sigma_x).
ChiralState apply_kick(const ChiralState& state, double kick);

// |amp_R|^2
double racemization_of(const ChiralState& state);

struct BlochVector {
  double x, y, z;
};

// z = |a_L|^2 - |a_R|^2, y = 2 Im(a_L conj(a_R)), x = 2 Re(a_L conj(a_R)).
// For eps = 0 evolution from |L>, z + i y = exp(2 i theta_LR).
BlochVector bloch_of(const ChiralState& state);

}  // namespace chiral
