#pragma once

// JSON run configuration: group, representation, reference representation
// and diagnostic settings. Validation reports every problem at once.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anosov/diagnostics.hpp"

namespace anosov {

inline constexpr int kSchemaVersion = 1;

/// Recursive representation recipe. kind is one of tau, explicit, exterior,
/// direct_sum, dual, conjugate.
struct RepSpec {
  std::string kind;
  int d = 0;                   // tau
  bool orthonormal = false;    // tau
  std::vector<Mat> images;     // explicit
  int k = 0;                   // exterior
  Mat matrix;                  // conjugate
  std::vector<RepSpec> parts;  // direct_sum; base for exterior, dual, conjugate
};

struct GroupConfig {
  std::vector<Moebius> generators;
  std::vector<Word> peripherals;
  long long cap = 2'000'000;
  bool dedup = false;
};

struct DiagnosticsConfig {
  int L = 6;
  std::vector<int> ks;  ///< empty: every k = 1..d-1
  GapOptions gaps;
  double exponent_tol = 0.1;
  double angle_tol = 1e-4;
  double tp_tol = 1e-6;
  std::vector<long long> n_range = default_n_range();
  std::vector<double> t_grid{-4, -3, -2, -1, 0, 1, 2, 3, 4};
  int limit_L = 6;
  int limit_points = 50;
  int tuple_budget = 200;
  bool hitchin = false;
  bool limit_map = false;
  bool cusp_distortion = true;
  std::uint64_t seed = 0;
};

struct Config {
  int schema_version = kSchemaVersion;
  std::string name;
  GroupConfig group;
  RepSpec representation;
  std::optional<RepSpec> reference;
  std::string reference_name = "reference";
  DiagnosticsConfig diagnostics;
  nlohmann::json source;  ///< the validated input, for hashing and echoing
};

/// Throws ConfigError listing every offending field.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);

Representation build_representation(const RepSpec& spec, std::span<const Moebius> generators);

/// 64-bit FNV-1a over a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace anosov
