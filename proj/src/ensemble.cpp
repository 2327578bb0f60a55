#include "chiral/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "chiral/csv.hpp"
#include "chiral/dynamics.hpp"
#include "chiral/error.hpp"
#include "chiral/numerics.hpp"

namespace chiral {

GasSpec GasSpec::from_params(const MolecularParams& params, const Constants& c,
                             double b_max_scale) {
  GasSpec spec;
  spec.density_N = params.density_N;
  spec.temperature_T = params.temperature_T;
  spec.collision_mass_m = params.collision_mass_m;
  spec.gamma = gamma_coupling(params, c);
  spec.exponent_p = params.exponent_p;
  spec.b_max = b_max_scale * impact_parameter_for_kick(0.01, spec.mean_speed(c), spec.gamma,
                                                       spec.exponent_p, c);
  spec.shell_R = spec.density_N > 0.0 ? 10.0 * std::cbrt(1.0 / spec.density_N) : 0.0;
  return spec;
}

double GasSpec::mean_speed(const Constants& c) const {
  return std::sqrt(8.0 * c.boltzmann * temperature_T / (std::numbers::pi * collision_mass_m));
}

double GasSpec::collision_frequency(const Constants& c) const {
  return density_N * std::numbers::pi * b_max * b_max * mean_speed(c);
}

std::uint64_t RngPolicy::trajectory_seed(std::uint64_t index) const noexcept {
  std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double kick_shape_integral(int p) {
  return std::sqrt(std::numbers::pi) * std::tgamma((p - 1) / 2.0) / std::tgamma(p / 2.0);
}

double phase_kick(double b, double v, double gamma, int p, const Constants& c) {
  if (!(b > 0.0) || !(v > 0.0)) throw std::invalid_argument("phase_kick: b and v must be positive");
  return gamma / c.hbar * kick_shape_integral(p) / (v * std::pow(b, p - 1));
}

double impact_parameter_for_kick(double kick, double v, double gamma, int p, const Constants& c) {
  return std::pow(gamma / c.hbar * kick_shape_integral(p) / (v * kick), 1.0 / (p - 1));
}

std::vector<CollisionEvent> sample_collisions(const GasSpec& spec, double duration,
                                              std::mt19937_64& rng, const Constants& c) {
  std::vector<CollisionEvent> events;
  const double nu = spec.collision_frequency(c);
  if (!(nu > 0.0) || !(duration > 0.0)) return events;
  std::exponential_distribution<double> gap(nu);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::gamma_distribution<double> energy(2.0, 1.0);
  const double thermal = 2.0 * c.boltzmann * spec.temperature_T / spec.collision_mass_m;
  double t = gap(rng);
  while (t < duration) {
    // b^2 uniform on (0, b_max^2]
    const double b = spec.b_max * std::sqrt(1.0 - unit(rng));
    // flux-weighted relative speed: m v^2 / 2kT ~ Gamma(2, 1)
    const double v = std::sqrt(thermal * energy(rng));
    events.push_back({t, b, v, phase_kick(b, v, spec.gamma, spec.exponent_p, c)});
    t += gap(rng);
  }
  return events;
}

namespace {

// Per-trajectory observables on the grid, laid out [point][r, x, y, z].
struct Samples {
  std::size_t n_points;
  std::vector<double> data;  // n_traj * n_points * 4

  double* row(std::size_t traj) { return data.data() + traj * n_points * 4; }
  const double* row(std::size_t traj) const { return data.data() + traj * n_points * 4; }
};

void record(double* slot, const ChiralState& s) {
  const BlochVector b = bloch_of(s);
  slot[0] = racemization_of(s);
  slot[1] = b.x;
  slot[2] = b.y;
  slot[3] = b.z;
}

void record_phase(double* slot, double theta) {
  const double s = std::sin(theta);
  slot[0] = s * s;
  slot[1] = 0.0;
  slot[2] = std::sin(2.0 * theta);
  slot[3] = std::cos(2.0 * theta);
}

template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([=, &body] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
}

// Reduction in trajectory-index order with compensated sums, so the result
// does not depend on how trajectories were scheduled.
EnsembleResult reduce(const Samples& samples, std::size_t n_traj, std::span<const double> t_grid) {
  const std::size_t n_points = t_grid.size();
  const double n = static_cast<double>(n_traj);
  std::vector<double> r_mean(n_points), r_se(n_points), env(n_points), env_se(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    CompensatedSum sr, sx, sy, sz;
    for (std::size_t i = 0; i < n_traj; ++i) {
      const double* slot = samples.row(i) + 4 * k;
      sr.add(slot[0]);
      sx.add(slot[1]);
      sy.add(slot[2]);
      sz.add(slot[3]);
    }
    const double mr = sr.value() / n;
    const double mx = sx.value() / n, my = sy.value() / n, mz = sz.value() / n;
    const double length = std::sqrt(mx * mx + my * my + mz * mz);
    // Project on the mean direction for the envelope error; fall back to z.
    double ux = 0.0, uy = 0.0, uz = 1.0;
    if (length > 0.0) {
      ux = mx / length;
      uy = my / length;
      uz = mz / length;
    }
    CompensatedSum vr, vp;
    for (std::size_t i = 0; i < n_traj; ++i) {
      const double* slot = samples.row(i) + 4 * k;
      const double dr = slot[0] - mr;
      const double dp = slot[1] * ux + slot[2] * uy + slot[3] * uz - length;
      vr.add(dr * dr);
      vp.add(dp * dp);
    }
    const double denom = n_traj > 1 ? (n - 1.0) * n : 1.0;
    r_mean[k] = mr;
    r_se[k] = n_traj > 1 ? std::sqrt(vr.value() / denom) : 0.0;
    env[k] = std::min(1.0, length);
    env_se[k] = n_traj > 1 ? std::sqrt(vp.value() / denom) : 0.0;
  }
  EnsembleResult out;
  out.curve = ActivityCurve::from_racemization(std::vector<double>(t_grid.begin(), t_grid.end()),
                                               std::move(r_mean));
  out.racemization_se = std::move(r_se);
  out.envelope = std::move(env);
  out.envelope_se = std::move(env_se);
  out.n_traj = n_traj;
  return out;
}

void check_grid(std::span<const double> t_grid, std::size_t n_traj) {
  if (n_traj < 1) throw std::invalid_argument("ensemble needs at least one trajectory");
  if (t_grid.empty()) throw std::invalid_argument("ensemble needs a time grid");
  if (t_grid.front() < 0.0) throw std::invalid_argument("ensemble time grid must be >= 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("ensemble time grid must ascend");
  }
}

void dump_thetas(std::ostream& out, const std::vector<double>& thetas, std::size_t n_traj,
                 std::span<const double> t_grid) {
  out << "trajectory_index,time_s,theta_rad\n";
  for (std::size_t i = 0; i < n_traj; ++i) {
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      out << i << ',' << format_double(t_grid[k]) << ','
          << format_double(thetas[i * t_grid.size() + k]) << '\n';
    }
  }
}

}  // namespace

EnsembleResult run_impact_ensemble(const GasSpec& spec, double delta_rate, double eps_rate,
                                   std::span<const double> t_grid, std::size_t n_traj,
                                   const RngPolicy& rng_policy, const Constants& c,
                                   const EnsembleOptions& options) {
  check_grid(t_grid, n_traj);
  if (options.theta_dump && eps_rate != 0.0) {
    throw std::invalid_argument("theta dump is only defined for eps = 0");
  }
  const std::size_t n_points = t_grid.size();
  const double horizon = t_grid.back();
  Samples samples{n_points, std::vector<double>(n_traj * n_points * 4)};
  std::vector<double> thetas(options.theta_dump ? n_traj * n_points : 0);

  parallel_for(n_traj, options.threads, [&](std::size_t traj) {
    std::mt19937_64 rng = rng_policy.engine(traj);
    auto events = sample_collisions(spec, horizon, rng, c);
    if (options.impact_cutoff > 0.0) {
      std::erase_if(events, [&](const CollisionEvent& e) { return e.impact_b > options.impact_cutoff; });
    }
    double* out = samples.row(traj);
    auto next = events.begin();
    if (eps_rate == 0.0) {
      // Collisional phase is kept reduced modulo pi; observables have period pi.
      double collisional = 0.0;
      for (std::size_t k = 0; k < n_points; ++k) {
        for (; next != events.end() && next->time <= t_grid[k]; ++next) {
          collisional = std::remainder(collisional + next->kick, std::numbers::pi);
        }
        const double theta = delta_rate * t_grid[k] + collisional;
        record_phase(out + 4 * k, theta);
        if (!thetas.empty()) thetas[traj * n_points + k] = theta;
      }
    } else {
      ChiralState state = ChiralState::left();
      double now = 0.0;
      for (std::size_t k = 0; k < n_points; ++k) {
        for (; next != events.end() && next->time <= t_grid[k]; ++next) {
          state = propagate_constant(state, 0.0, eps_rate, delta_rate, next->time - now);
          state = apply_kick(state, next->kick);
          now = next->time;
        }
        state = propagate_constant(state, 0.0, eps_rate, delta_rate, t_grid[k] - now);
        now = t_grid[k];
        record(out + 4 * k, state);
      }
    }
  });

  if (options.theta_dump) dump_thetas(*options.theta_dump, thetas, n_traj, t_grid);
  return reduce(samples, n_traj, t_grid);
}

ShellCheck check_shell(const GasSpec& spec, const Constants& c) {
  const int p = spec.exponent_p;
  const double N = spec.density_N;
  const double R = spec.shell_R;
  const double g = spec.gamma / c.hbar;
  ShellCheck out{};
  if (!(N > 0.0)) return {0.0, 0.0, 0.0, true};
  if (!(R > 0.0)) return {INFINITY, INFINITY, 0.0, false};
  out.far_mean = 4.0 * std::numbers::pi * N * g / ((p - 3.0) * std::pow(R, p - 3.0));
  out.far_rms = g * std::sqrt(4.0 * std::numbers::pi * N / ((2.0 * p - 3.0) * std::pow(R, 2.0 * p - 3.0)));
  const double r_med = std::cbrt(3.0 * std::numbers::ln2 / (4.0 * std::numbers::pi * N));
  out.median_nearest = g / std::pow(r_med, p);
  out.adequate = out.far_rms < 1e-3 * out.median_nearest;
  return out;
}

namespace {

double draw_shift(const GasSpec& spec, double far_mean, std::mt19937_64& rng, const Constants& c) {
  const double volume = 4.0 / 3.0 * std::numbers::pi * std::pow(spec.shell_R, 3);
  std::poisson_distribution<long long> count(spec.density_N * volume);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const long long k = count(rng);
  const double g = spec.gamma / c.hbar;
  const int p = spec.exponent_p;
  CompensatedSum sum;
  for (long long i = 0; i < k; ++i) {
    // radius of a uniform point in the ball: R u^(1/3), u in (0, 1]
    const double r = spec.shell_R * std::cbrt(1.0 - unit(rng));
    sum.add(g / std::pow(r, p));
  }
  sum.add(far_mean);
  return sum.value();
}

}  // namespace

double sample_quasistatic_shift(const GasSpec& spec, std::mt19937_64& rng, const Constants& c) {
  if (!(spec.density_N > 0.0)) return 0.0;
  const ShellCheck shell = check_shell(spec, c);
  if (!shell.adequate) {
    throw Error(ErrorCode::ShellTooSmall,
                "far-field rms " + std::to_string(shell.far_rms) + " s^-1 is not below 1e-3 of the median shift " +
                    std::to_string(shell.median_nearest) + " s^-1");
  }
  return draw_shift(spec, shell.far_mean, rng, c);
}

EnsembleResult run_quasistatic_ensemble(const GasSpec& spec, double delta_rate,
                                        std::span<const double> t_grid, std::size_t n_config,
                                        const RngPolicy& rng_policy, const Constants& c,
                                        const EnsembleOptions& options) {
  check_grid(t_grid, n_config);
  if (spec.density_N > 0.0 && !check_shell(spec, c).adequate) {
    throw Error(ErrorCode::ShellTooSmall, "quasi-static sphere is too small for the 1e-3 tail check");
  }
  const std::size_t n_points = t_grid.size();
  Samples samples{n_points, std::vector<double>(n_config * n_points * 4)};
  std::vector<double> thetas(options.theta_dump ? n_config * n_points : 0);

  parallel_for(n_config, options.threads, [&](std::size_t cfg) {
    std::mt19937_64 rng = rng_policy.engine(cfg);
    const double shift = sample_quasistatic_shift(spec, rng, c);
    double* out = samples.row(cfg);
    for (std::size_t k = 0; k < n_points; ++k) {
      const double theta = (delta_rate + shift) * t_grid[k];
      record_phase(out + 4 * k, theta);
      if (!thetas.empty()) thetas[cfg * n_points + k] = theta;
    }
  });

  if (options.theta_dump) dump_thetas(*options.theta_dump, thetas, n_config, t_grid);
  return reduce(samples, n_config, t_grid);
}

double holtsmark_envelope_rate(const GasSpec& spec, const Constants& c) {
  const int p = spec.exponent_p;
  return 8.0 * std::numbers::pi / p * spec.density_N * std::pow(spec.gamma / c.hbar, 3.0 / p) *
         quasistatic_integral(p);
}

}  // namespace chiral
