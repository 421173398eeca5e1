#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pat/phantom.hpp"
#include "pat/recon.hpp"
#include "pat/receivers.hpp"
#include "pat/spectral.hpp"

namespace pat {

/// Parse or validation failure; what() starts with "<source>:<line>:<col>:"
/// when the position is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridBlock {
  std::array<int, kDim> dims{128, 128};
  double dx = 0.4e-3;
  int pml_size = 20;
  double pml_alpha_max = 2.0;
  int nt = 600;
  double dt = 0.08e-6;
};

struct MediumBlock {
  double c = 1500.0;
  double rho0 = 1000.0;
  /// Optional dataset files holding full-grid arrays "c" / "rho0".
  std::string c_file;
  std::string rho0_file;
};

enum class ArrayKind { kCircular, kOnGrid };

struct ArrayBlock {
  ArrayKind kind = ArrayKind::kOnGrid;
  // circular
  int n_receivers = 32;
  double radius = 22.5e-3;
  double half_length = 2e-3;
  int nodes_per_receiver = 40;
  // on-grid
  std::vector<Side> sides{Side::kLeft, Side::kBottom, Side::kRight};
  int inset = 2;
  /// Kernel cut-off as a multiple of 1/b^d.
  double eps_factor = 0.01;
};

enum class PhantomKind { kDisc, kVessel };

struct PhantomBlock {
  PhantomKind kind = PhantomKind::kDisc;
  double radius = 18e-3;
  double lo = 0.0;
  double hi = 1.0;
  VesselParams vessel;
};

struct SeedBlock {
  std::uint64_t phantom = 1;
  std::uint64_t noise = 2;
  std::uint64_t trials = 1000;
  std::uint64_t power = 7;
};

struct ExperimentConfig {
  std::string name = "custom";
  GridBlock grid;
  MediumBlock medium;
  ArrayBlock array;
  SmootherSpec smoother;
  ReconConfig recon;
  /// kNoNoise when absent.
  double snr_db = kNoNoise;
  PhantomBlock phantom;
  SeedBlock seeds;
  /// Number of inner-product trials.
  int trials = 10;
};

/// Parses YAML text. Unknown keys and ill-typed values are errors. Fields not
/// present keep the values already in `base`.
ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base = {});

/// Fully resolved YAML echo that parse_config reads back to the same values.
std::string to_yaml(const ExperimentConfig& config);

/// 16 hex digits of a 64-bit FNV-1a hash of to_yaml(config).
std::string config_digest(const ExperimentConfig& config);

/// Checks ranges that parse_config cannot (e.g. dx > 0); throws ConfigError.
void validate(const ExperimentConfig& config);

std::string to_string(Side side);
Side side_from_string(const std::string& s);

}  // namespace pat
