#include "chiral/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "chiral/closed_form.hpp"
#include "chiral/csv.hpp"
#include "chiral/ensemble.hpp"
#include "chiral/error.hpp"
#include "chiral/fit.hpp"
#include "chiral/verify.hpp"

namespace chiral {

RunContext resolve_context(const GlobalOptions& global) {
  RunContext ctx;
  if (global.params_path) {
    ctx.file = load_param_file(*global.params_path);
  } else {
    ctx.file.params = MolecularParams::standard();
  }
  std::string preset = "paper-compat";
  if (ctx.file.constants_preset) preset = *ctx.file.constants_preset;
  if (global.preset) preset = *global.preset;
  ctx.constants = Constants::preset(preset);
  if (global.hbar_override) {
    if (!(*global.hbar_override > 0.0)) throw Error(ErrorCode::Config, "--hbar must be positive");
    ctx.constants.hbar = *global.hbar_override;
    ctx.constants.name += "+hbar=" + format_double(*global.hbar_override);
  }
  return ctx;
}

namespace {

// Sends output to --out when given, otherwise to the caller's stream.
class OutputTarget {
 public:
  OutputTarget(const GlobalOptions& global, std::ostream& fallback) : stream_(&fallback) {
    if (global.out) {
      file_.open(*global.out, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorCode::Config, "cannot write " + global.out->string());
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void add_param_meta(CsvBlock& block, const RunContext& ctx) {
  const MolecularParams& p = ctx.file.params;
  block.add_meta("preset", ctx.constants.name);
  block.add_meta("hbar", ctx.constants.hbar);
  block.add_meta("A", p.A());
  block.add_meta("mu", p.mu);
  block.add_meta("omega", p.omega);
  block.add_meta("a", p.a);
  block.add_meta("d", p.d);
  block.add_meta("theta", p.theta);
  block.add_meta("R", p.cavity_R);
  block.add_meta("N", p.density_N);
  block.add_meta("T", p.temperature_T);
  block.add_meta("m", p.collision_mass_m);
  block.add_meta("p", static_cast<double>(p.exponent_p));
}

double eps_for(const RunContext& ctx, const std::optional<double>& cli_eps) {
  if (cli_eps) {
    if (*cli_eps < 0.0) throw Error(ErrorCode::Config, "--eps must be >= 0");
    return *cli_eps;
  }
  return ctx.file.eps_rate.value_or(0.0);
}

std::vector<double> linear_grid(double t_max, std::size_t n_points) {
  if (!(t_max > 0.0) || n_points < 2) throw Error(ErrorCode::Config, "time grid needs t_max > 0 and >= 2 points");
  std::vector<double> out(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    out[i] = t_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
  }
  return out;
}

// 0 followed by n-1 log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n_points) {
  if (!(lo > 0.0) || !(hi > lo) || n_points < 3) throw Error(ErrorCode::Config, "bad log time grid");
  std::vector<double> out{0.0};
  const std::size_t n = n_points - 1;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  return out;
}

}  // namespace

int cmd_derive(const GlobalOptions& global, const DeriveOptions& options, std::ostream& out,
               std::ostream& /*log*/) {
  const RunContext ctx = resolve_context(global);
  const Constants& c = ctx.constants;
  const MolecularParams& p = ctx.file.params;
  const DerivedRates rates = derive_rates(p, c);
  const double eps = eps_for(ctx, options.eps_rate);
  const int pe = p.exponent_p;

  OutputTarget target(global, out);
  std::ostream& o = target.stream();
  auto line = [&](const char* key, double value) { o << key << " = " << format_double(value) << '\n'; };

  o << "# derived rates, preset " << c.name << '\n';
  line("A", p.A());
  line("barrier_action", rates.barrier_action);
  line("delta_per_s", rates.delta_rate);
  line("delta_per_year", unit_convert(rates.delta_rate, RateUnit::PerSecond, RateUnit::PerYear, c));
  line("delta_reference_fit_per_s", reference_fit::delta_rate(p.A()));
  line("tau_s", rates.tau);
  line("tau_hours", rates.tau / c.seconds_per_hour);
  line("tau_years", rates.tau / c.seconds_per_year);
  line("tau_half_years", 0.5 * rates.tau / c.seconds_per_year);
  line("activity_period_s", std::numbers::pi * rates.tau);
  line("phi_per_s", rates.phi_rate);
  line("phi_reference_fit_per_s", reference_fit::phi_rate(p.A()));
  line("gamma_erg_cm_p", rates.gamma);
  line("lambda_per_s", rates.lambda_impact);
  line("lambda_per_hour", unit_convert(rates.lambda_impact, RateUnit::PerSecond, RateUnit::PerHour, c));
  line("lambda_per_year", unit_convert(rates.lambda_impact, RateUnit::PerSecond, RateUnit::PerYear, c));
  o << "lambda_calibrated = " << (rates.lambda_impact_calibrated ? "true" : "false") << '\n';
  if (pe == 4) line("lambda_reference_fit_per_year", reference_fit::lambda_per_year(p.A()));
  line("stretch_exponent", 3.0 / pe);
  line("lambda_star_per_s_3p", rates.lambda_qs);
  const double star_year = lambda_quasistatic_per_year(p, c);
  const double star_linear = lambda_quasistatic_per_year_linear(p, c);
  line("lambda_star_per_year_3p", star_year);
  line("lambda_star_per_year_3p_linear_conversion", star_linear);
  if (pe == 4) line("lambda_star_reference_fit_per_year_3p", reference_fit::lambda_star_per_year34(p.A()));
  o << "lambda_star_note = per_year_3p uses (s/y)^(3/p); linear_conversion multiplies by s/y "
       "and reproduces the 2.90e12 exp(-7.14 A) prefactor. They differ by "
    << format_double(star_linear / star_year) << "x and are not interchangeable.\n";
  line("eps_per_s", eps);
  if (eps > 0.0 || rates.delta_rate + rates.phi_rate > 0.0) {
    line("theta_amplitude", amplitude_theta({eps}, rates.delta_rate, rates.phi_rate));
    line("theta_amplitude_no_phi", amplitude_theta({eps}, rates.delta_rate, 0.0));
    line("activity_asymptote", asymptotic_activity({eps}, rates.delta_rate));
  }
  return kExitOk;
}

int cmd_curve(const GlobalOptions& global, const CurveOptions& options, std::ostream& out,
              std::ostream& /*log*/) {
  const RunContext ctx = resolve_context(global);
  const Constants& c = ctx.constants;
  const MolecularParams& p = ctx.file.params;
  const double delta = tunneling_delta(p, c);
  const double phi = phi_static(p, c);
  const double eps = eps_for(ctx, options.eps_rate);
  const std::string& model = options.model;

  auto law_named = [&](const std::string& name) {
    if (name == "dilute") return DecayLaw::exponential(lambda_impact(p, c).value);
    if (name == "dense") return DecayLaw::stretched(lambda_quasistatic(p, c), p.exponent_p);
    throw Error(ErrorCode::Config, "unknown decay law '" + name + "' (dilute | dense)");
  };
  // Time for the decay exponent f(t) to reach 8.
  auto decay_time = [](const DecayLaw& law) {
    if (!(law.rate > 0.0)) return 0.0;
    if (law.kind == DecayKind::Exponential) return 8.0 / law.rate;
    return std::pow(8.0 / law.rate, law.stretch_p / 3.0);
  };

  std::function<double(double)> activity;
  double t_scale = 0.0;
  DecayLaw law;
  if (model == "isolated") {
    activity = [=](double t) { return activity_static(delta, 0.0, t); };
    t_scale = 10.0 * std::numbers::pi / (2.0 * delta);
  } else if (model == "static") {
    activity = [=](double t) { return activity_static(delta, phi, t); };
    t_scale = 10.0 * std::numbers::pi / (2.0 * (delta + phi));
  } else if (model == "dilute" || model == "dense") {
    law = law_named(model);
    activity = [=](double t) { return activity_collisional(delta, law, t); };
    t_scale = decay_time(law);
  } else if (model == "weak-static") {
    activity = [=](double t) { return activity_weak_static({eps}, delta, phi, t); };
    t_scale = 10.0 * std::numbers::pi / (2.0 * std::hypot(eps, delta + phi));
  } else if (model == "weak-collisional") {
    law = law_named(options.law);
    activity = [=](double t) { return activity_weak_collisional({eps}, delta, law, t); };
    t_scale = decay_time(law);
  } else {
    throw Error(ErrorCode::Config, "unknown model '" + model +
                                       "' (isolated | static | dilute | dense | weak-static | weak-collisional)");
  }
  const double t_max = options.t_max > 0.0 ? options.t_max : t_scale;
  std::vector<double> times = linear_grid(t_max, options.n_points);
  std::vector<double> values(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) values[i] = activity(times[i]);
  const ActivityCurve curve = ActivityCurve::from_activity(times, values);

  CsvBlock block;
  block.add_meta("command", "curve");
  block.add_meta("model", model);
  add_param_meta(block, ctx);
  block.add_meta("eps_over_hbar", eps);
  block.add_meta("delta_per_s", delta);
  block.add_meta("phi_per_s", phi);
  if (law.kind != DecayKind::None) {
    block.add_meta("decay_law", law.kind == DecayKind::Exponential ? "exponential" : "stretched");
    block.add_meta("decay_rate", law.rate);
  }
  block.columns = {"time_s", "activity", "racemization"};
  for (std::size_t i = 0; i < curve.size(); ++i) {
    block.rows.push_back({curve.times()[i], curve.activity()[i], curve.racemization()[i]});
  }
  OutputTarget target(global, out);
  write_csv(target.stream(), {block});
  return kExitOk;
}

int cmd_fig2(const GlobalOptions& global, const Fig2Options& options, std::ostream& out,
             std::ostream& /*log*/) {
  const RunContext ctx = resolve_context(global);
  if (options.eps_rates.empty()) throw Error(ErrorCode::Config, "fig2 needs at least one eps value");
  const std::vector<double> grid = a_grid(options.a_min, options.a_max, options.a_step);
  std::vector<CsvBlock> blocks;
  for (double eps : options.eps_rates) {
    if (eps < 0.0) throw Error(ErrorCode::Config, "eps values must be >= 0");
    const auto curve = theta_curve({eps}, grid, ctx.file.params, ctx.constants, options.include_phi);
    CsvBlock block;
    block.add_meta("command", "fig2");
    block.add_meta("eps_over_hbar", eps);
    block.add_meta("include_phi", options.include_phi ? "true" : "false");
    add_param_meta(block, ctx);
    try {
      block.add_meta("crossover_A", stability_threshold({eps}, ctx.file.params, ctx.constants, 0.5,
                                                        options.include_phi));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCrossing) throw;
      block.add_meta("crossover_A", "none");
    }
    block.columns = {"A", "theta"};
    for (const auto& pt : curve) block.rows.push_back({pt.A, pt.theta});
    blocks.push_back(std::move(block));
  }
  OutputTarget target(global, out);
  write_csv(target.stream(), blocks);
  return kExitOk;
}

int cmd_ensemble(const GlobalOptions& global, const EnsembleCommandOptions& options,
                 std::ostream& out, std::ostream& log) {
  const RunContext ctx = resolve_context(global);
  const Constants& c = ctx.constants;
  const MolecularParams& p = ctx.file.params;
  if (options.n_traj < 1) throw Error(ErrorCode::Config, "--n-traj must be >= 1");
  if (!(options.b_max_scale > 0.0)) throw Error(ErrorCode::Config, "--b-max-scale must be positive");
  const double delta = tunneling_delta(p, c);
  const GasSpec spec = GasSpec::from_params(p, c, options.b_max_scale);
  const RngPolicy policy{global.seed};

  std::ofstream dump_file;
  EnsembleOptions run_options;
  run_options.threads = options.threads;
  if (options.dump_theta) {
    dump_file.open(*options.dump_theta, std::ios::binary | std::ios::trunc);
    if (!dump_file) throw Error(ErrorCode::Config, "cannot write " + options.dump_theta->string());
    run_options.theta_dump = &dump_file;
  }

  CsvBlock block;
  block.add_meta("command", "ensemble");
  block.add_meta("regime", options.regime);
  add_param_meta(block, ctx);
  block.add_meta("seed", std::to_string(global.seed));
  block.add_meta("n_traj", std::to_string(options.n_traj));

  EnsembleResult result;
  std::optional<EnvelopeFit> fit;
  std::string fit_error;
  std::vector<std::pair<std::string, double>> summary;

  if (options.regime == "impact") {
    const double eps = options.eps_rate.value_or(0.0);
    if (eps < 0.0) throw Error(ErrorCode::Config, "--eps must be >= 0");
    const double analytic = lambda_impact(p, c).value;
    double t_max = options.t_max;
    if (!(t_max > 0.0)) t_max = analytic > 0.0 ? 4.0 / analytic : 2.0 * std::numbers::pi / delta;
    const auto grid = linear_grid(t_max, options.n_points);
    result = run_impact_ensemble(spec, delta, eps, grid, options.n_traj, policy, c, run_options);
    block.add_meta("eps_over_hbar", eps);
    block.add_meta("b_max", spec.b_max);
    block.add_meta("collision_frequency", spec.collision_frequency(c));
    try {
      fit = fit_envelope(result.curve.times(), result.envelope, FitKind::Exponential, std::nullopt,
                         {0.05, 1.0, 10});
      summary = {{"fit_rate_per_s", fit->rate},
                 {"fit_r_squared", fit->r_squared},
                 {"analytic_lambda_per_s", analytic},
                 {"ratio_fit_to_analytic", analytic > 0.0 ? fit->rate / analytic : NAN}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientDecay) throw;
      fit_error = to_string(e.code());
    }
  } else if (options.regime == "quasistatic") {
    if (options.eps_rate && *options.eps_rate != 0.0) {
      throw Error(ErrorCode::Config, "--eps is only supported for the impact regime");
    }
    const double direct = lambda_quasistatic(p, c);
    const double markov = holtsmark_envelope_rate(spec, c);
    const double power = p.exponent_p / 3.0;
    std::vector<double> grid;
    if (options.t_max > 0.0) {
      grid = log_grid(options.t_max * 1e-4, options.t_max, options.n_points);
    } else if (markov > 0.0) {
      grid = log_grid(std::pow(0.005 / markov, power), std::pow(5.0 / markov, power), options.n_points);
    } else {
      const double t_max = 2.0 * std::numbers::pi / delta;
      grid = log_grid(t_max * 1e-4, t_max, options.n_points);
    }
    result = run_quasistatic_ensemble(spec, delta, grid, options.n_traj, policy, c, run_options);
    block.add_meta("shell_R", spec.shell_R);
    try {
      const EnvelopeFit free = fit_envelope(result.curve.times(), result.envelope, FitKind::Stretched,
                                            std::nullopt, {0.05, 0.98, 10});
      fit = fit_envelope(result.curve.times(), result.envelope, FitKind::Stretched, p.exponent_p,
                         {0.05, 0.98, 10});
      summary = {{"fit_free_stretch", free.stretch},
                 {"fit_free_r_squared", free.r_squared},
                 {"fit_rate_per_s_3p", fit->rate},
                 {"fit_r_squared", fit->r_squared},
                 {"analytic_lambda_star_per_s_3p", direct},
                 {"ratio_fit_to_analytic", direct > 0.0 ? fit->rate / direct : NAN},
                 {"markov_rate_per_s_3p", markov},
                 {"ratio_fit_to_markov", fit->rate / markov}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientDecay) throw;
      fit_error = to_string(e.code());
    }
  } else {
    throw Error(ErrorCode::Config, "unknown regime '" + options.regime + "' (impact | quasistatic)");
  }

  if (fit) {
    for (const auto& [k, v] : summary) block.add_meta(k, v);
  } else {
    block.add_meta("fit", fit_error);
  }
  block.columns = {"time_s", "racemization", "racemization_se", "activity", "envelope", "envelope_se"};
  const ActivityCurve& curve = result.curve;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    block.rows.push_back({curve.times()[i], curve.racemization()[i], result.racemization_se[i],
                          curve.activity()[i], result.envelope[i], result.envelope_se[i]});
  }
  OutputTarget target(global, out);
  write_csv(target.stream(), {block});

  if (!fit) {
    log << "envelope fit failed: " << fit_error << '\n';
    return kExitNumerical;
  }
  for (const auto& [k, v] : summary) log << k << " = " << format_double(v) << '\n';
  return kExitOk;
}

int cmd_verify(const GlobalOptions& global, const VerifyOptions& options, std::ostream& out,
               std::ostream& /*log*/) {
  const RunContext ctx = resolve_context(global);
  AcceptanceConfig config;
  config.constants = ctx.constants;
  config.quick = options.quick;
  config.seed = global.seed;
  config.threads = options.threads;
  OutputTarget target(global, out);
  std::ostream& o = target.stream();
  const auto results = run_acceptance(config, [&](const CheckResult& r) { o << format_check(r) << std::flush; });
  bool ok = true;
  for (const auto& r : results) ok = ok && (r.passed || r.skipped);
  o << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
  return ok ? kExitOk : kExitVerifyFailed;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  CLI::App app{"Tunneling racemization of chiral molecules: rates, activity curves and Monte Carlo checks",
               "chiral"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::string params_path, preset, out_path;
  double hbar = 0.0;
  app.add_option("--params", params_path, "Parameter file (key = value)");
  app.add_option("--preset", preset, "Constants preset: paper-compat | modern-cgs");
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_option("--seed", global.seed, "Master seed for Monte Carlo runs");
  app.add_option("--hbar", hbar, "Override hbar (erg s)");

  DeriveOptions derive;
  double derive_eps = -1.0;
  auto* derive_cmd = app.add_subcommand("derive", "Print derived rates");
  derive_cmd->add_option("--eps", derive_eps, "eps/hbar in s^-1");

  CurveOptions curve;
  double curve_eps = -1.0;
  auto* curve_cmd = app.add_subcommand("curve", "Emit an optical-activity curve as CSV");
  curve_cmd->add_option("--model", curve.model, "isolated | static | dilute | dense | weak-static | weak-collisional");
  curve_cmd->add_option("--law", curve.law, "Decay law for weak-collisional: dilute | dense");
  curve_cmd->add_option("--eps", curve_eps, "eps/hbar in s^-1");
  curve_cmd->add_option("--t-max", curve.t_max, "End time in seconds");
  curve_cmd->add_option("--points", curve.n_points, "Number of grid points");

  Fig2Options fig2;
  auto* fig2_cmd = app.add_subcommand("fig2", "Racemization amplitude versus A for each eps");
  fig2_cmd->add_option("--eps", fig2.eps_rates, "eps/hbar values in s^-1");
  fig2_cmd->add_option("--a-min", fig2.a_min);
  fig2_cmd->add_option("--a-max", fig2.a_max);
  fig2_cmd->add_option("--a-step", fig2.a_step);
  bool no_phi = false;
  fig2_cmd->add_flag("--no-phi", no_phi, "Drop the static mean-field coupling");

  EnsembleCommandOptions ensemble;
  double ens_eps = -1.0;
  std::string dump_path;
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Monte Carlo collisional ensemble");
  ensemble_cmd->add_option("--regime", ensemble.regime, "impact | quasistatic");
  ensemble_cmd->add_option("--n-traj", ensemble.n_traj, "Trajectories (configurations)");
  ensemble_cmd->add_option("--eps", ens_eps, "eps/hbar in s^-1 (impact only)");
  ensemble_cmd->add_option("--t-max", ensemble.t_max, "End time in seconds");
  ensemble_cmd->add_option("--points", ensemble.n_points, "Number of grid points");
  ensemble_cmd->add_option("--b-max-scale", ensemble.b_max_scale, "Multiplier on the default b_max");
  ensemble_cmd->add_option("--threads", ensemble.threads, "Worker threads (0 = all cores)");
  ensemble_cmd->add_option("--dump-theta", dump_path, "Write raw per-trajectory phases to this CSV");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance checks");
  verify_cmd->add_flag("--quick", verify.quick, "Skip Monte Carlo checks");
  verify_cmd->add_option("--threads", verify.threads);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (!params_path.empty()) global.params_path = params_path;
  if (!preset.empty()) global.preset = preset;
  if (!out_path.empty()) global.out = out_path;
  if (app.count("--hbar")) global.hbar_override = hbar;

  try {
    if (*derive_cmd) {
      if (derive_cmd->count("--eps")) derive.eps_rate = derive_eps;
      return cmd_derive(global, derive, out, log);
    }
    if (*curve_cmd) {
      if (curve_cmd->count("--eps")) curve.eps_rate = curve_eps;
      return cmd_curve(global, curve, out, log);
    }
    if (*fig2_cmd) {
      fig2.include_phi = !no_phi;
      return cmd_fig2(global, fig2, out, log);
    }
    if (*ensemble_cmd) {
      if (ensemble_cmd->count("--eps")) ensemble.eps_rate = ens_eps;
      if (!dump_path.empty()) ensemble.dump_theta = dump_path;
      return cmd_ensemble(global, ensemble, out, log);
    }
    if (*verify_cmd) return cmd_verify(global, verify, out, log);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::Config:
      case ErrorCode::MissingGamma:
      case ErrorCode::DimensionMismatch: return kExitConfig;
      default: return kExitNumerical;
    }
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace chiral
