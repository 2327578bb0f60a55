#pragma once

// Monte Carlo ensembles for collisional dephasing of the L-R tunneling phase.
//
// Impact regime: perturbers fly by on straight lines, each passage adds an
// instantaneous kick to theta_LR. Quasi-static regime: a frozen Poisson cloud
// of perturbers shifts the coupling by sum gamma / (hbar R_i^p).

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "chiral/closed_form.hpp"
#include "chiral/fit.hpp"
#include "chiral/params.hpp"

namespace chiral {

struct GasSpec {
  double density_N = 0.0;         // cm^-3
  double temperature_T = 0.0;     // K
  double collision_mass_m = 0.0;  // g
  double gamma = 0.0;             // erg cm^p
  int exponent_p = 4;
  double b_max = 0.0;    // cm, impact-parameter cutoff
  double shell_R = 0.0;  // cm, quasi-static sampling sphere

  // Defaults: b_max where the kick at the mean speed is 0.01 rad (times
  // b_max_scale), shell_R = 10 N^(-1/3).
  static GasSpec from_params(const MolecularParams& params, const Constants& c,
                             double b_max_scale = 1.0);

  // sqrt(8 k T / (pi m))
  double mean_speed(const Constants& c) const;
  // N pi b_max^2 <v>
  double collision_frequency(const Constants& c) const;
};

struct CollisionEvent {
  double time;       // s
  double impact_b;   // cm
  double rel_speed;  // cm/s
  double kick;       // rad
};

// Per-trajectory seed = splitmix64(master_seed + (index + 1) * 0x9E3779B97F4A7C15),
// feeding a std::mt19937_64.
struct RngPolicy {
  std::uint64_t master_seed = 0;

  std::uint64_t trajectory_seed(std::uint64_t index) const noexcept;
  std::mt19937_64 engine(std::uint64_t index) const { return std::mt19937_64(trajectory_seed(index)); }
};

// c_p = integral (1 + x^2)^(-p/2) dx over the real line.
double kick_shape_integral(int p);

// Phase jump of a straight-line flyby: (gamma/hbar) c_p / (v b^(p-1)).
double phase_kick(double b, double v, double gamma, int p, const Constants& c);

// b such that phase_kick(b, v, gamma, p) = kick.
double impact_parameter_for_kick(double kick, double v, double gamma, int p, const Constants& c);

// Poisson arrivals on [0, duration) at collision_frequency(); b with density
// proportional to b on (0, b_max]; speeds flux-weighted Maxwellian.
std::vector<CollisionEvent> sample_collisions(const GasSpec& spec, double duration,
                                              std::mt19937_64& rng, const Constants& c);

struct EnsembleResult {
  ActivityCurve curve;
  std::vector<double> racemization_se;
  // Length of the ensemble-mean Bloch vector; equals |<exp(2 i theta_LR)>| for eps = 0.
  std::vector<double> envelope;
  std::vector<double> envelope_se;
  std::size_t n_traj = 0;
};

struct EnsembleOptions {
  unsigned threads = 0;                 // 0: hardware concurrency
  std::ostream* theta_dump = nullptr;   // CSV trajectory_index,time_s,theta_rad
  // Impact regime only: ignore collisions with b above this value (0 keeps
  // all). Thinning a run at a larger b_max this way yields the smaller-cutoff
  // process on the same random numbers.
  double impact_cutoff = 0.0;
};

// eps = 0: theta_LR(t) = delta t + sum of kicks. eps != 0: exact two-level
// propagation between kicks, each kick applied as exp(-i kick sigma_x).
EnsembleResult run_impact_ensemble(const GasSpec& spec, double delta_rate, double eps_rate,
                                   std::span<const double> t_grid, std::size_t n_traj,
                                   const RngPolicy& rng_policy, const Constants& c,
                                   const EnsembleOptions& options = {});

struct ShellCheck {
  double far_rms;        // rms shift from perturbers beyond shell_R, s^-1
  double far_mean;       // mean shift from beyond shell_R, s^-1 (added back)
  double median_nearest; // median nearest-neighbour shift, s^-1
  bool adequate;         // far_rms < 1e-3 median_nearest
};

ShellCheck check_shell(const GasSpec& spec, const Constants& c);

// One frozen configuration: K ~ Poisson(N 4/3 pi shell_R^3) perturbers uniform
// in the sphere; returns sum gamma/(hbar R_i^p) plus the mean contribution of
// the medium outside the sphere. Throws ShellTooSmall if check_shell fails.
double sample_quasistatic_shift(const GasSpec& spec, std::mt19937_64& rng, const Constants& c);

EnsembleResult run_quasistatic_ensemble(const GasSpec& spec, double delta_rate,
                                        std::span<const double> t_grid, std::size_t n_config,
                                        const RngPolicy& rng_policy, const Constants& c,
                                        const EnsembleOptions& options = {});

// Exact magnitude decay constant of the quasi-static envelope for the Poisson
// cloud in an infinite medium: (8 pi / p) N (gamma/hbar)^(3/p) I_p.
double holtsmark_envelope_rate(const GasSpec& spec, const Constants& c);

}  // namespace chiral
