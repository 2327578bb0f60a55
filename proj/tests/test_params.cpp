#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chiral/error.hpp"
#include "chiral/numerics.hpp"
#include "chiral/param_file.hpp"
#include "chiral/params.hpp"

using namespace chiral;

namespace {

const Constants kPaper = Constants::paper_compat();
const Constants kModern = Constants::modern_cgs();

// I_p = 2^(a-1) Gamma(1-a) cos(pi a / 2) / a with a = 3/p.
double ip_closed_form(int p) {
  const double a = 3.0 / p;
  return std::pow(2.0, a - 1.0) * std::tgamma(1.0 - a) * std::cos(std::numbers::pi * a / 2.0) / a;
}

}  // namespace

TEST_CASE("barrier action") {
  auto p = MolecularParams::standard().with_A(1.0);
  CHECK(barrier_action(p, kPaper) == doctest::Approx(9.524).epsilon(5e-4));
  CHECK(barrier_action(p, kModern) == doctest::Approx(9.482).epsilon(5e-4));
  p.a = 0.0;
  CHECK(barrier_action(p, kPaper) == 0.0);
}

TEST_CASE("tunneling splitting") {
  const auto p = MolecularParams::standard();
  const double delta = tunneling_delta(p, kPaper);
  CHECK(delta == doctest::Approx(8.24e-5).epsilon(0.01));
  CHECK(1.0 / delta / 3600.0 == doctest::Approx(3.37).epsilon(0.01));
  CHECK(tunneling_delta(p.with_A(1.0), kPaper) == doctest::Approx(4.05e8).epsilon(0.01));
  auto far = p;
  far.a = 1e-6;
  CHECK(tunneling_delta(far, kPaper) == 0.0);
  // Direct evaluation of the formula.
  const double s = p.mu * p.omega * p.a * p.a / kPaper.hbar;
  CHECK(delta == doctest::Approx(p.omega / std::pow(std::numbers::pi, 1.5) * std::sqrt(s) * std::exp(-s)).epsilon(1e-14));
}

TEST_CASE("static mean-field coupling") {
  auto p = MolecularParams::standard();
  const double suppression = std::exp(-barrier_action(p, kPaper));
  CHECK(phi_static(p, kPaper) / suppression == doctest::Approx(1.52e12).epsilon(0.01));
  p.cavity_R = 3e-8;
  CHECK(phi_static(p, kPaper) / suppression == doctest::Approx(1.18e13).epsilon(0.01));
  p.d = 0.0;
  CHECK(phi_static(p, kPaper) == 0.0);
}

TEST_CASE("gamma coupling") {
  auto p = MolecularParams::standard();
  const double s = barrier_action(p, kPaper);
  CHECK(gamma_coupling(p, kPaper) == doctest::Approx(1e-44 * std::exp(-s)).epsilon(1e-14));
  auto flat = p;
  flat.mu = 0.0;
  CHECK(gamma_coupling(flat, kPaper) == doctest::Approx(1e-44).epsilon(1e-14));
  auto none = p;
  none.theta = 0.0;
  CHECK(gamma_coupling(none, kPaper) == 0.0);

  auto p6 = p;
  p6.exponent_p = 6;
  CHECK_THROWS_AS(gamma_coupling(p6, kPaper), Error);
  CHECK(gamma_coupling(p6, kPaper, 2e-60) == 2e-60);
  p6.gamma = 3e-60;
  CHECK(gamma_coupling(p6, kPaper) == 3e-60);
}

TEST_CASE("impact rate") {
  const auto p = MolecularParams::standard();
  const double per_year = unit_convert(lambda_impact(p, kPaper).value, RateUnit::PerSecond, RateUnit::PerYear, kPaper);
  CHECK(per_year == doctest::Approx(6969.0).epsilon(0.03));
  CHECK(reference_fit::lambda_per_year(4.3) == doctest::Approx(6969.0).epsilon(0.01));
  CHECK(lambda_impact(p.with_density(0.0), kPaper).value == 0.0);
  CHECK(lambda_impact(p, kPaper).calibrated);

  // 13.0 N (kT/m)^(1/6) (gamma/hbar)^(2/3)
  const double g = gamma_coupling(p, kPaper);
  const double expected = 13.0 * p.density_N * std::pow(kPaper.boltzmann * p.temperature_T / p.collision_mass_m, 1.0 / 6.0) *
                          std::pow(g / kPaper.hbar, 2.0 / 3.0);
  CHECK(lambda_impact(p, kPaper).value == doctest::Approx(expected).epsilon(1e-12));

  auto p5 = p;
  p5.exponent_p = 5;
  p5.gamma = 1e-55;
  CHECK_FALSE(lambda_impact(p5, kPaper).calibrated);

  // Fit form 5.03e15 exp(-6.35 A) tracks the direct evaluation across the range.
  for (double A : {3.0, 4.0, 5.0, 6.0}) {
    const auto pa = p.with_A(A);
    const double direct = unit_convert(lambda_impact(pa, kPaper).value, RateUnit::PerSecond, RateUnit::PerYear, kPaper);
    CHECK(direct == doctest::Approx(reference_fit::lambda_per_year(A)).epsilon(0.03));
  }
}

TEST_CASE("quasi-static integral against the Gamma-function closed form") {
  for (int p : {4, 5, 6, 8, 12}) {
    CAPTURE(p);
    CHECK(quasistatic_integral(p) == doctest::Approx(ip_closed_form(p)).epsilon(1e-8));
  }
  CHECK(quasistatic_integral(4) == doctest::Approx(1.555614466806).epsilon(1e-10));
}

TEST_CASE("quasi-static rate") {
  const auto p = MolecularParams::standard();
  const double g = gamma_coupling(p, kPaper);
  CHECK(lambda_quasistatic(p, kPaper) ==
        doctest::Approx(2.86 * std::numbers::pi * p.density_N * std::pow(g / (2.0 * kPaper.hbar), 0.75)).epsilon(1e-12));
  CHECK(lambda_quasistatic(p.with_density(0.0), kPaper) == 0.0);
  CHECK(reference_fit::lambda_star_per_year34(4.3) == doctest::Approx(0.134).epsilon(0.01));

  const double star = lambda_quasistatic_per_year(p, kPaper);
  CHECK(star / std::exp(-7.14 * 4.3) == doctest::Approx(3.8e10).epsilon(0.03));
  const double linear = lambda_quasistatic_per_year_linear(p, kPaper);
  CHECK(linear == doctest::Approx(0.134).epsilon(0.03));
  CHECK(linear / star == doctest::Approx(std::pow(kPaper.seconds_per_year, 0.25)).epsilon(1e-12));
}

TEST_CASE("derived rate bundle") {
  const auto r = derive_rates(MolecularParams::standard().with_A(5.8), kPaper);
  CHECK(0.5 * r.tau / kPaper.seconds_per_year >= 195.0);
  CHECK(r.tau == doctest::Approx(1.0 / r.delta_rate));
}

TEST_CASE("unit conversion") {
  CHECK(unit_convert(6969.0, RateUnit::PerYear, RateUnit::PerHour, kPaper) == doctest::Approx(0.795).epsilon(1e-3));
  CHECK(unit_convert(1.0, RateUnit::PerSecond, RateUnit::PerYear, kPaper) == 3.156e7);
  CHECK(unit_convert(1.0, RateUnit::PerSecondStretched, RateUnit::PerYearStretched, kPaper) ==
        doctest::Approx(4.2e5).epsilon(0.01));
  CHECK_THROWS_AS(unit_convert(1.0, RateUnit::PerSecond, RateUnit::PerYearStretched, kPaper), Error);
  for (auto u : {RateUnit::PerSecond, RateUnit::PerHour, RateUnit::PerYear, RateUnit::PerSecondStretched,
                 RateUnit::PerYearStretched}) {
    CHECK(parse_rate_unit(to_string(u)) == u);
  }
  // Round trip is exact up to rounding.
  const double back = unit_convert(unit_convert(2.5, RateUnit::PerSecond, RateUnit::PerYear, kPaper), RateUnit::PerYear,
                                   RateUnit::PerSecond, kPaper);
  CHECK(back == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("constant presets") {
  CHECK(Constants::preset("paper-compat").hbar == kPaper.hbar);
  CHECK(Constants::preset("modern-cgs").hbar == 1.0546e-27);
  CHECK_THROWS_AS(Constants::preset("si"), Error);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(MolecularParams::standard().validate());
  CHECK_NOTHROW(MolecularParams::standard().with_density(0.0).validate());
  auto bad = MolecularParams::standard();
  bad.temperature_T = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = MolecularParams::standard();
  bad.exponent_p = 3;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("parameter files") {
  ParamFile f;
  f.params = MolecularParams::standard().with_A(4.7);
  f.eps_rate = 1e-3;
  f.constants_preset = "modern-cgs";
  const std::string text = format_param_file(f);
  const ParamFile back = parse_param_text(text);
  CHECK(back.params.omega == f.params.omega);
  CHECK(back.params.cavity_R == f.params.cavity_R);
  CHECK(back.eps_rate == f.eps_rate);
  CHECK(back.constants_preset == f.constants_preset);
  CHECK(format_param_file(back) == text);

  const std::string minimal =
      "# standard set\nmu = 1e-23\nomega = 4.3e13\na = 1e-8\nd = 1e-18\ntheta = 1e-26\n"
      "R = 5e-8\nN = 1e17\nT = 300\nm = 1e-22\np = 4\n";
  CHECK(parse_param_text(minimal).params.A() == doctest::Approx(4.3));

  auto expect_error = [](const std::string& t, const std::string& fragment) {
    try {
      parse_param_text(t);
      FAIL("no error for: " << t);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Config);
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  std::string missing = minimal;
  missing.erase(missing.find("theta"), std::string("theta = 1e-26\n").size());
  expect_error(missing, "theta");
  expect_error(minimal + "colour = red\n", "colour");
  expect_error(minimal + "N = 2e17\n", "N");
  expect_error(minimal + "just words\n", "");
  std::string p35 = minimal;
  p35.replace(p35.find("p = 4"), 5, "p = 4.5");
  expect_error(p35, "p");
}
