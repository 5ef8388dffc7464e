#pragma once

#include "qins/picard.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qins {

/// Invalid configuration; the message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat `key = value` text with `#` comments.
std::map<std::string, std::string> parse_key_values(std::istream& in);

struct RunConfig {
  Mode mode = Mode::Torus;
  double l1 = 0.0, l2 = 0.0;  // 0 means the default for the mode (2 pi torus, pi rectangle)
  int n1 = 32, n2 = 32;
  PhysParams params;
  double dt = 1e-3;
  double total = 0.1;
  PicardConfig picard;
  std::string init_kind = "cosine";
  double init_amplitude = 0.1;
  std::string init_file;
  std::string output_dir = "out";
  int output_stride = 10;
  std::uint64_t seed = 1;

  double spectrum_a0 = 1.0;
  std::vector<double> spectrum_a0_sweep{1.0, 0.5, 0.25, 0.125};
  int spectrum_modes = 10;

  std::vector<double> contraction_windows{0.04, 0.02, 0.01};

  std::string lincheck_c0 = "random";
  double lincheck_a0 = 1.0;
  double lincheck_amplitude = 0.5;
  int lincheck_samples = 50;

  double check_mass_drift = 1e-10;
  double check_lt2 = 1e-8;

  Grid grid() const;
  /// Initial (v0, c0) from init.kind; v0 = 0 except for snapshot files.
  MaterialState initial_state() const;
};

/// Parse and validate; throws ConfigError naming the key.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace qins
