#include "chiral/param_file.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "chiral/csv.hpp"
#include "chiral/error.hpp"

namespace chiral {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::Config,
                "key '" + std::string(key) + "': '" + std::string(value) + "' is not a number");
  }
  return out;
}

constexpr std::array<std::string_view, 10> kRequired = {"mu", "omega", "a", "d", "theta",
                                                        "R",  "N",     "T", "m", "p"};

}  // namespace

ParamFile parse_param_text(std::string_view text) {
  std::map<std::string, std::string, std::less<>> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": empty key or value");
    }
    if (!entries.emplace(key, value).second) {
      throw Error(ErrorCode::Config, "duplicate key '" + key + "'");
    }
  }

  for (const auto& [key, value] : entries) {
    const bool known = std::find(kRequired.begin(), kRequired.end(), key) != kRequired.end() ||
                       key == "eps_over_hbar" || key == "constants_preset" || key == "gamma";
    if (!known) throw Error(ErrorCode::Config, "unknown key '" + key + "'");
  }
  for (auto key : kRequired) {
    if (!entries.contains(key)) {
      throw Error(ErrorCode::Config, "missing key '" + std::string(key) + "'");
    }
  }

  auto number = [&](std::string_view key) { return parse_number(key, entries.find(key)->second); };

  ParamFile out;
  MolecularParams& p = out.params;
  p.mu = number("mu");
  p.omega = number("omega");
  p.a = number("a");
  p.d = number("d");
  p.theta = number("theta");
  p.cavity_R = number("R");
  p.density_N = number("N");
  p.temperature_T = number("T");
  p.collision_mass_m = number("m");
  const double p_value = number("p");
  if (p_value != std::floor(p_value) || p_value < 4.0 || p_value > 64.0) {
    throw Error(ErrorCode::Config, "key 'p': must be an integer >= 4");
  }
  p.exponent_p = static_cast<int>(p_value);
  if (entries.contains("gamma")) p.gamma = number("gamma");
  if (entries.contains("eps_over_hbar")) {
    out.eps_rate = number("eps_over_hbar");
    if (*out.eps_rate < 0.0) throw Error(ErrorCode::Config, "key 'eps_over_hbar': must be >= 0");
  }
  if (auto it = entries.find("constants_preset"); it != entries.end()) {
    Constants::preset(it->second);  // validates the name
    out.constants_preset = it->second;
  }
  p.validate();
  return out;
}

ParamFile load_param_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open parameter file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_param_text(buffer.str());
}

std::string format_param_file(const ParamFile& file) {
  const MolecularParams& p = file.params;
  std::ostringstream out;
  out << "mu = " << format_double(p.mu) << '\n'
      << "omega = " << format_double(p.omega) << '\n'
      << "a = " << format_double(p.a) << '\n'
      << "d = " << format_double(p.d) << '\n'
      << "theta = " << format_double(p.theta) << '\n'
      << "R = " << format_double(p.cavity_R) << '\n'
      << "N = " << format_double(p.density_N) << '\n'
      << "T = " << format_double(p.temperature_T) << '\n'
      << "m = " << format_double(p.collision_mass_m) << '\n'
      << "p = " << p.exponent_p << '\n';
  if (p.gamma) out << "gamma = " << format_double(*p.gamma) << '\n';
  if (file.eps_rate) out << "eps_over_hbar = " << format_double(*file.eps_rate) << '\n';
  if (file.constants_preset) out << "constants_preset = " << *file.constants_preset << '\n';
  return out.str();
}

}  // namespace chiral
