#include "chiral/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "chiral/error.hpp"
#include "chiral/numerics.hpp"

namespace chiral {

EnvelopeFit fit_envelope(std::span<const double> times, std::span<const double> envelope,
                         FitKind kind, std::optional<int> stretch_p, const FitOptions& options) {
  if (times.size() != envelope.size()) {
    throw std::invalid_argument("fit_envelope: times and envelope differ in length");
  }
  if (envelope.empty() || *std::min_element(envelope.begin(), envelope.end()) >= 0.9) {
    throw Error(ErrorCode::InsufficientDecay, "envelope never falls below 0.9");
  }
  const bool free_exponent = kind == FitKind::Stretched && !stretch_p;
  if (stretch_p && *stretch_p < 4) throw std::invalid_argument("fit_envelope: p must be >= 4");
  const double power = kind == FitKind::Exponential ? 1.0 : (stretch_p ? 3.0 / *stretch_p : 0.0);

  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double e = envelope[i];
    if (!(e >= options.min_envelope && e <= options.max_envelope)) continue;
    if (free_exponent) {
      if (!(t > 0.0) || !(e < 1.0)) continue;
      x.push_back(std::log(t));
      y.push_back(std::log(-std::log(e)));
    } else {
      if (t < 0.0) continue;
      x.push_back(power == 1.0 ? t : std::pow(t, power));
      y.push_back(-std::log(e));
    }
  }
  if (x.size() < options.min_points) {
    throw Error(ErrorCode::InsufficientDecay,
                "only " + std::to_string(x.size()) + " usable envelope points");
  }

  const LineFit line = fit_line(x, y);
  EnvelopeFit out;
  out.kind = kind;
  out.n_points = x.size();
  out.r_squared = std::clamp(line.r_squared, 0.0, 1.0);
  if (free_exponent) {
    out.stretch = line.slope;
    out.rate = std::exp(line.intercept);
  } else {
    out.stretch = power;
    out.rate = std::max(0.0, line.slope);
  }
  return out;
}

}  // namespace chiral
