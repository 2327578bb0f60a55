#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "chiral/ensemble.hpp"
#include "chiral/error.hpp"
#include "chiral/numerics.hpp"

using namespace chiral;

namespace {

const Constants kPaper = Constants::paper_compat();

// Kolmogorov-Smirnov p-value for a sample against a continuous CDF, using the
// asymptotic distribution with the Stephens small-sample correction.
template <class Cdf>
double ks_p_value(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
  return std::clamp(q, 0.0, 1.0);
}

std::vector<CollisionEvent> collect_events(const GasSpec& spec, double duration, std::size_t target, std::uint64_t seed) {
  std::vector<CollisionEvent> all;
  std::mt19937_64 rng(seed);
  while (all.size() < target) {
    auto ev = sample_collisions(spec, duration, rng, kPaper);
    all.insert(all.end(), ev.begin(), ev.end());
  }
  return all;
}

}  // namespace

TEST_CASE("kick shape integral against a trigonometric quadrature") {
  CHECK(kick_shape_integral(4) == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-14));
  for (int p : {4, 5, 6, 7, 10}) {
    // x = tan(u): integral of cos^(p-2) u over (-pi/2, pi/2)
    const double oracle = adaptive_simpson([p](double u) { return std::pow(std::cos(u), p - 2); },
                                           -std::numbers::pi / 2.0, std::numbers::pi / 2.0, 1e-13);
    CHECK(kick_shape_integral(p) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("phase kick") {
  const double g = 1e-50;
  CHECK(phase_kick(1e-7, 1e4, g, 4, kPaper) ==
        doctest::Approx(std::numbers::pi * g / (2.0 * kPaper.hbar * 1e4 * 1e-21)).epsilon(1e-12));
  CHECK(phase_kick(1e-7, 2e4, g, 4, kPaper) == doctest::Approx(0.5 * phase_kick(1e-7, 1e4, g, 4, kPaper)).epsilon(1e-14));
  CHECK(phase_kick(1e3, 1e4, g, 4, kPaper) < 1e-30);
  const double b = impact_parameter_for_kick(0.01, 3e4, g, 4, kPaper);
  CHECK(phase_kick(b, 3e4, g, 4, kPaper) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("gas defaults") {
  const auto p = MolecularParams::standard();
  const GasSpec spec = GasSpec::from_params(p, kPaper);
  CHECK(spec.mean_speed(kPaper) == doctest::Approx(std::sqrt(8.0 * kPaper.boltzmann * 300.0 / (std::numbers::pi * 1e-22))));
  CHECK(phase_kick(spec.b_max, spec.mean_speed(kPaper), spec.gamma, 4, kPaper) == doctest::Approx(0.01));
  CHECK(spec.shell_R == doctest::Approx(10.0 * std::cbrt(1e-17)));
  CHECK(GasSpec::from_params(p, kPaper, 2.0).b_max == doctest::Approx(2.0 * spec.b_max));
}

TEST_CASE("collision sampling") {
  const auto p = MolecularParams::standard();
  const GasSpec spec = GasSpec::from_params(p, kPaper);
  const double nu = spec.collision_frequency(kPaper);

  SUBCASE("no perturbers, no events") {
    std::mt19937_64 rng(1);
    CHECK(sample_collisions(GasSpec::from_params(p.with_density(0.0), kPaper), 1e6, rng, kPaper).empty());
  }

  SUBCASE("event counts are Poisson with mean nu D") {
    // 1000 windows of expected count 100: dispersion statistic ~ chi^2(999).
    const double D = 100.0 / nu;
    std::mt19937_64 rng(2024);
    double stat = 0.0, total = 0.0;
    const int windows = 1000;
    for (int w = 0; w < windows; ++w) {
      const double k = static_cast<double>(sample_collisions(spec, D, rng, kPaper).size());
      stat += (k - 100.0) * (k - 100.0) / 100.0;
      total += k;
    }
    CHECK(total >= 9.8e4);
    const boost::math::chi_squared dist(windows - 1);
    const double cdf = boost::math::cdf(dist, stat);
    CHECK(2.0 * std::min(cdf, 1.0 - cdf) > 0.01);
    // Mean count: normal approximation of the total.
    CHECK(std::abs(total - 1e5) < 4.0 * std::sqrt(1e5));
  }

  SUBCASE("b^2 uniform, flux-weighted speeds, ordered times, consistent kicks") {
    const auto events = collect_events(spec, 1000.0 / nu, 100000, 99);
    std::vector<double> b2, energy;
    const double kT = kPaper.boltzmann * spec.temperature_T;
    for (const auto& e : events) {
      b2.push_back(e.impact_b * e.impact_b / (spec.b_max * spec.b_max));
      energy.push_back(0.5 * spec.collision_mass_m * e.rel_speed * e.rel_speed / kT);
      CHECK_FALSE(e.impact_b > spec.b_max);
    }
    CHECK(ks_p_value(b2, [](double x) { return x; }) > 0.01);
    CHECK(ks_p_value(energy, [](double x) { return 1.0 - (1.0 + x) * std::exp(-x); }) > 0.01);

    std::mt19937_64 rng(5);
    const auto one = sample_collisions(spec, 500.0 / nu, rng, kPaper);
    CHECK(std::is_sorted(one.begin(), one.end(), [](const auto& a, const auto& b) { return a.time < b.time; }));
    for (const auto& e : one) {
      CHECK(e.kick == doctest::Approx(phase_kick(e.impact_b, e.rel_speed, spec.gamma, 4, kPaper)).epsilon(1e-14));
    }
  }
}

TEST_CASE("seed policy") {
  const RngPolicy a{42}, b{42}, c{43};
  CHECK(a.trajectory_seed(0) == b.trajectory_seed(0));
  CHECK(a.trajectory_seed(0) != a.trajectory_seed(1));
  CHECK(a.trajectory_seed(0) != c.trajectory_seed(0));
  auto e1 = a.engine(7), e2 = b.engine(7);
  CHECK(e1() == e2());
}

TEST_CASE("ensembles without perturbers reproduce free tunneling") {
  const auto p = MolecularParams::standard().with_density(0.0);
  const GasSpec spec = GasSpec::from_params(p, kPaper);
  const double delta = tunneling_delta(p, kPaper);
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(i * 1000.0);
  const auto impact = run_impact_ensemble(spec, delta, 0.0, grid, 20, RngPolicy{1}, kPaper);
  const auto qs = run_quasistatic_ensemble(spec, delta, grid, 20, RngPolicy{1}, kPaper);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = std::pow(std::sin(delta * grid[i]), 2);
    CHECK(impact.curve.racemization()[i] == doctest::Approx(r).epsilon(1e-12));
    CHECK(qs.curve.racemization()[i] == doctest::Approx(r).epsilon(1e-12));
    CHECK(impact.envelope[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
  std::mt19937_64 rng(3);
  CHECK(sample_quasistatic_shift(spec, rng, kPaper) == 0.0);
}

TEST_CASE("weak splitting ensemble without perturbers matches the closed form") {
  const auto p = MolecularParams::standard().with_density(0.0);
  const GasSpec spec = GasSpec::from_params(p, kPaper);
  const double delta = tunneling_delta(p, kPaper);
  const double eps = 2.0 * delta;
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(i * 500.0);
  const auto res = run_impact_ensemble(spec, delta, eps, grid, 4, RngPolicy{1}, kPaper);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(res.curve.activity()[i] == doctest::Approx(activity_weak_static({eps}, delta, 0.0, grid[i])).epsilon(1e-10));
  }
}

TEST_CASE("quasi-static shifts") {
  const auto p = MolecularParams::standard();
  GasSpec spec = GasSpec::from_params(p, kPaper);
  const ShellCheck shell = check_shell(spec, kPaper);
  CHECK(shell.adequate);
  CHECK(shell.far_rms < 1e-3 * shell.median_nearest);

  SUBCASE("linear in gamma") {
    GasSpec tripled = spec;
    tripled.gamma *= 3.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
      auto r1 = RngPolicy{11}.engine(i);
      auto r2 = RngPolicy{11}.engine(i);
      CHECK(sample_quasistatic_shift(tripled, r2, kPaper) ==
            doctest::Approx(3.0 * sample_quasistatic_shift(spec, r1, kPaper)).epsilon(1e-12));
    }
  }

  SUBCASE("characteristic function is a stretched exponential in t^(3/p)") {
    std::vector<double> shifts;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      auto rng = RngPolicy{5}.engine(i);
      shifts.push_back(sample_quasistatic_shift(spec, rng, kPaper));
    }
    const double h = holtsmark_envelope_rate(spec, kPaper);
    std::vector<double> x, y;
    for (int k = 1; k <= 30; ++k) {
      const double s = 0.05 + 2.0 * k / 30.0;  // target h t^(3/4)
      const double t = std::pow(s / h, 4.0 / 3.0);
      double re = 0.0, im = 0.0;
      for (double f : shifts) {
        re += std::cos(2.0 * f * t);
        im += std::sin(2.0 * f * t);
      }
      const double env = std::hypot(re, im) / shifts.size();
      x.push_back(std::pow(t, 0.75));
      y.push_back(-std::log(env));
    }
    const LineFit fit = fit_line(x, y);
    CHECK(fit.r_squared > 0.99);
    CHECK(fit.slope == doctest::Approx(h).epsilon(0.05));
  }

  SUBCASE("shell too small is rejected") {
    spec.shell_R = 0.5 * std::cbrt(1.0 / spec.density_N);
    std::mt19937_64 rng(1);
    try {
      sample_quasistatic_shift(spec, rng, kPaper);
      FAIL("expected ShellTooSmall");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ShellTooSmall);
    }
  }
}

TEST_CASE("impact ensemble decays and is reproducible") {
  const auto p = MolecularParams::standard();
  const GasSpec spec = GasSpec::from_params(p, kPaper);
  const double delta = tunneling_delta(p, kPaper);
  const double lam = lambda_impact(p, kPaper).value;
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(4.0 / lam * i / 40.0);
  EnsembleOptions one, three;
  one.threads = 1;
  three.threads = 3;
  const auto a = run_impact_ensemble(spec, delta, 0.0, grid, 2000, RngPolicy{8}, kPaper, one);
  const auto b = run_impact_ensemble(spec, delta, 0.0, grid, 2000, RngPolicy{8}, kPaper, three);
  CHECK(a.envelope == b.envelope);
  CHECK(a.curve.racemization() == b.curve.racemization());
  CHECK(a.envelope.back() < 0.2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.curve.racemization()[i] >= 0.0);
    CHECK(a.curve.racemization()[i] <= 1.0);
    CHECK(a.envelope_se[i] >= 0.0);
  }

  std::ostringstream dump;
  EnsembleOptions with_dump;
  with_dump.theta_dump = &dump;
  run_impact_ensemble(spec, delta, 0.0, std::vector<double>{0.0, grid[10]}, 3, RngPolicy{8}, kPaper, with_dump);
  const std::string text = dump.str();
  CHECK(text.find("trajectory_index,time_s,theta_rad") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') >= 7);
}
