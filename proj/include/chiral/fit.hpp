#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace chiral {

enum class FitKind { Exponential, Stretched };

struct EnvelopeFit {
  FitKind kind = FitKind::Exponential;
  double rate = 0.0;     // s^-1, or s^-stretch
  double stretch = 1.0;  // fitted or imposed exponent of t
  double r_squared = 0.0;
  std::size_t n_points = 0;
  std::size_t n_traj = 0;
};

struct FitOptions {
  // Only points with min_envelope <= e <= max_envelope enter the fit.
  double min_envelope = 0.02;
  double max_envelope = 1.0;
  std::size_t min_points = 10;
};

// Log-domain least squares:
//   Exponential           -ln e  vs t
//   Stretched, p given    -ln e  vs t^(3/p)
//   Stretched, no p       ln(-ln e) vs ln t  (free exponent: slope = stretch)
// Throws InsufficientDecay when the envelope never drops below 0.9 or fewer
// than min_points samples survive the selection.
EnvelopeFit fit_envelope(std::span<const double> times, std::span<const double> envelope,
                         FitKind kind, std::optional<int> stretch_p = std::nullopt,
                         const FitOptions& options = {});

}  // namespace chiral
