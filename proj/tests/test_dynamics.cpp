#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "chiral/dynamics.hpp"
#include "chiral/error.hpp"

using namespace chiral;

namespace {

DriveSpec constant_drive(double E0, double eps, double delta, double phi) {
  return {E0, eps, delta, {}, [phi](double) { return phi; }};
}

}  // namespace

TEST_CASE("half oscillation transfers L to R") {
  const DriveSpec drive = constant_drive(0.0, 0.0, 1.0, 0.0);
  const Trajectory tr = integrate(ChiralState::left(), drive, 0.0, std::numbers::pi / 2.0, default_step(drive, 0.0));
  CHECK(racemization_of(tr.states.back()) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(tr.times.back() == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-15));
}

TEST_CASE("constant mean field follows sin^2((delta+phi) t)") {
  const DriveSpec drive = constant_drive(0.0, 0.0, 1.0, 0.37);
  const Trajectory tr = integrate(ChiralState::left(), drive, 0.0, 20.0, default_step(drive, 0.0));
  for (std::size_t i = 0; i < tr.times.size(); i += 97) {
    CHECK(racemization_of(tr.states[i]) == doctest::Approx(std::pow(std::sin(1.37 * tr.times[i]), 2)).epsilon(1e-8));
  }
}

TEST_CASE("large splitting caps the racemization") {
  const DriveSpec drive = constant_drive(0.0, 10.0, 1.0, 0.0);
  const Trajectory tr = integrate(ChiralState::left(), drive, 0.0, 2.0, default_step(drive, 0.0));
  double peak = 0.0;
  for (const auto& s : tr.states) peak = std::max(peak, racemization_of(s));
  CHECK(peak == doctest::Approx(1.0 / 101.0).epsilon(1e-6));
}

TEST_CASE("norm drift stays below 1e-9 over 1e5 default steps") {
  const DriveSpec drive = constant_drive(0.4, 0.8, 1.0, 0.3);
  const double h = default_step(drive, 0.0);
  const Trajectory tr = integrate(ChiralState::left(), drive, 0.0, 1e5 * h, h);
  CHECK(tr.states.size() == 100001);
  CHECK(tr.norm_drift < 1e-9);
}

TEST_CASE("oversized step is rejected") {
  const DriveSpec drive = constant_drive(0.0, 0.0, 1.0, 0.0);
  try {
    integrate(ChiralState::left(), drive, 0.0, 1.0, 0.5);
    FAIL("expected StepTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepTooLarge);
  }
}

TEST_CASE("common energy only changes a global phase") {
  const DriveSpec a = constant_drive(0.0, 0.5, 1.0, 0.2);
  const DriveSpec b = constant_drive(3.0, 0.5, 1.0, 0.2);
  const double h = default_step(b, 0.0);
  const Trajectory ta = integrate(ChiralState::left(), a, 0.0, 10.0, h);
  const Trajectory tb = integrate(ChiralState::left(), b, 0.0, 10.0, h);
  REQUIRE(ta.states.size() == tb.states.size());
  for (std::size_t i = 0; i < ta.states.size(); i += 50) {
    CHECK(std::norm(ta.states[i].amp_R) == doctest::Approx(std::norm(tb.states[i].amp_R)).epsilon(1e-9));
  }
}

TEST_CASE("mirror symmetry: eps -> -eps with L and R exchanged") {
  const DriveSpec a = constant_drive(0.0, 0.6, 1.0, 0.0);
  const DriveSpec b = constant_drive(0.0, -0.6, 1.0, 0.0);
  const double h = default_step(a, 0.0);
  const Trajectory ta = integrate(ChiralState::left(), a, 0.0, 8.0, h);
  const Trajectory tb = integrate(ChiralState::right(), b, 0.0, 8.0, h);
  for (std::size_t i = 0; i < ta.states.size(); i += 50) {
    CHECK(std::abs(ta.states[i].amp_L - tb.states[i].amp_R) < 1e-12);
    CHECK(std::abs(ta.states[i].amp_R - tb.states[i].amp_L) < 1e-12);
  }
}

TEST_CASE("exact propagator") {
  // eps = 0: a_R = -i sin((delta+phi) t) up to a global phase.
  const ChiralState s = propagate_constant(ChiralState::left(), 0.0, 0.0, 1.3, 0.7);
  CHECK(std::abs(s.amp_R - std::complex<double>(0.0, -std::sin(1.3 * 0.7))) < 1e-15);
  CHECK(std::abs(s.amp_L - std::cos(1.3 * 0.7)) < 1e-15);
  // Decoupled wells.
  for (double t : {0.1, 3.0, 100.0}) {
    CHECK(std::abs(propagate_constant(ChiralState::left(), 0.2, 0.9, 0.0, t).amp_R) == 0.0);
  }
  // eps = delta: at the sine peak r = Theta = 1/2.
  const double Delta = std::hypot(1.0, 1.0);
  CHECK(racemization_of(propagate_constant(ChiralState::left(), 0.0, 1.0, 1.0, std::numbers::pi / (2.0 * Delta))) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("phase-integral evolution") {
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(0.05 * i);
  const Trajectory free = evolve_phase_integral(ChiralState::left(), 0.8, {}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(racemization_of(free.states[i]) == doctest::Approx(std::pow(std::sin(0.8 * grid[i]), 2)).epsilon(1e-14));
  }
  const Trajectory constant = evolve_phase_integral(ChiralState::left(), 0.8, [](double) { return 0.25; }, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ChiralState ex = propagate_constant(ChiralState::left(), 0.0, 0.0, 1.05, grid[i]);
    CHECK(std::abs(ex.amp_L - constant.states[i].amp_L) < 1e-10);
    CHECK(std::abs(ex.amp_R - constant.states[i].amp_R) < 1e-10);
  }
  // A rectangular pulse of area pi shifts theta_LR by pi and so leaves O unchanged afterwards.
  const RateFunction pulse = [](double t) { return (t >= 2.0 && t < 2.5) ? 2.0 * std::numbers::pi : 0.0; };
  const Trajectory kicked = evolve_phase_integral(ChiralState::left(), 0.8, pulse, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2.6) continue;
    const auto a = bloch_of(kicked.states[i]);
    const auto b = bloch_of(free.states[i]);
    CHECK(a.z == doctest::Approx(b.z).epsilon(1e-8));
  }
}

TEST_CASE("racemization and Bloch vector helpers") {
  CHECK(racemization_of(ChiralState::left()) == 0.0);
  CHECK(racemization_of(ChiralState::right()) == 1.0);
  const double h = std::sqrt(0.5);
  const ChiralState even{{h, 0.0}, {h, 0.0}};
  CHECK(racemization_of(even) == doctest::Approx(0.5));
  CHECK(bloch_of(even).x == doctest::Approx(1.0));
  CHECK(bloch_of(ChiralState::left()).z == 1.0);
  // A kick of pi/2 swaps the wells.
  CHECK(racemization_of(apply_kick(ChiralState::left(), std::numbers::pi / 2.0)) == doctest::Approx(1.0));
}

TEST_CASE("random homochiral drives leave populations unchanged") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = U(rng), w = 2.0 + U(rng);
    const DriveSpec plain = constant_drive(0.0, 0.4, 1.0, 0.1);
    DriveSpec gauged = plain;
    gauged.u_of_t = [a, w](double t) { return a * std::cos(w * t); };
    const double h = 2.0 * std::numbers::pi / 3.0 / 1000.0;
    const Trajectory ta = integrate(ChiralState::left(), plain, 0.0, 10.0, h);
    const Trajectory tb = integrate(ChiralState::left(), gauged, 0.0, 10.0, h);
    for (std::size_t i = 0; i < ta.states.size(); i += 100) {
      CHECK(std::abs(std::norm(ta.states[i].amp_L) - std::norm(tb.states[i].amp_L)) < 1e-9);
    }
  }
}
