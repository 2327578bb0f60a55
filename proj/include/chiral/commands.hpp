#pragma once

// Command implementations behind the `chiral` executable. Exit codes:
// 0 success, 1 verification failure, 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chiral/param_file.hpp"
#include "chiral/params.hpp"

namespace chiral {

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitConfig = 2, kExitNumerical = 3 };

struct GlobalOptions {
  std::optional<std::filesystem::path> params_path;  // default: standard parameters
  std::optional<std::string> preset;                 // overrides constants_preset in the file
  std::optional<std::filesystem::path> out;          // default: stdout
  std::uint64_t seed = 20240917;
  std::optional<double> hbar_override;
};

// Parameters and constants after applying file, preset and overrides.
struct RunContext {
  ParamFile file;
  Constants constants;
};

RunContext resolve_context(const GlobalOptions& global);

struct DeriveOptions {
  std::optional<double> eps_rate;
};

struct CurveOptions {
  std::string model = "isolated";  // isolated static dilute dense weak-static weak-collisional
  std::string law = "dilute";      // decay law for weak-collisional: dilute | dense
  std::optional<double> eps_rate;
  double t_max = 0.0;  // 0: chosen from the model's time scale
  std::size_t n_points = 201;
};

struct Fig2Options {
  std::vector<double> eps_rates{1e-3, 1e-6};
  double a_min = 3.0;
  double a_max = 6.0;
  double a_step = 0.01;
  bool include_phi = true;
};

struct EnsembleCommandOptions {
  std::string regime = "impact";  // impact | quasistatic
  std::size_t n_traj = 10000;
  std::optional<double> eps_rate;  // impact only
  double t_max = 0.0;              // 0: chosen from the analytic rate
  std::size_t n_points = 61;
  double b_max_scale = 1.0;
  unsigned threads = 0;
  std::optional<std::filesystem::path> dump_theta;
};

struct VerifyOptions {
  bool quick = false;
  unsigned threads = 0;
};

// Each command writes its primary output to `out` (or to global.out when
// set) and diagnostics to `log`. Errors propagate as chiral::Error.
int cmd_derive(const GlobalOptions& global, const DeriveOptions& options, std::ostream& out,
               std::ostream& log);
int cmd_curve(const GlobalOptions& global, const CurveOptions& options, std::ostream& out,
              std::ostream& log);
int cmd_fig2(const GlobalOptions& global, const Fig2Options& options, std::ostream& out,
             std::ostream& log);
int cmd_ensemble(const GlobalOptions& global, const EnsembleCommandOptions& options,
                 std::ostream& out, std::ostream& log);
int cmd_verify(const GlobalOptions& global, const VerifyOptions& options, std::ostream& out,
               std::ostream& log);

// Full command line front end; maps exceptions onto exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace chiral
