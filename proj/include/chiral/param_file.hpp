#pragma once

// Flat "key = value" parameter files. Required keys: mu omega a d theta R N T m p.
// Optional: eps_over_hbar (s^-1), constants_preset, gamma (erg cm^p, needed for
// p != 4). '#' starts a comment. Unknown or duplicated keys are errors.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "chiral/params.hpp"

namespace chiral {

struct ParamFile {
  MolecularParams params;
  std::optional<double> eps_rate;
  std::optional<std::string> constants_preset;
};

ParamFile parse_param_text(std::string_view text);
ParamFile load_param_file(const std::filesystem::path& path);
std::string format_param_file(const ParamFile& file);

}  // namespace chiral
