#pragma once

// Command dispatch for anosov-lab: runs diagnostics for a validated config,
// writes report.json, tables/*.csv and the sample cache, and maps verdicts
// to exit codes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "anosov/config.hpp"

namespace anosov {

enum class Command { Classify, Gaps, LimitMap, Positivity, Cusp, Certify };

std::optional<Command> parse_command(std::string_view name);
std::string to_string(Command c);

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kCacheVersion = 1;

struct RunOptions {
  std::filesystem::path out;  ///< empty: write nothing
  int jobs = 1;
  std::optional<std::uint64_t> seed;  ///< overrides diagnostics.seed
  bool dump_flags = false;
};

struct RunResult {
  int exit_code = kExitPass;
  std::vector<CategoryResult> categories;
  nlohmann::json report;
  bool cache_hit = false;
};

/// 0 if every category passes, 1 if any fails, otherwise 3.
int exit_code_for(const std::vector<CategoryResult>& categories);

/// Runs one command. Library errors propagate; the CLI maps them to exit 2.
RunResult run_command(Command cmd, const Config& cfg, const RunOptions& opt);

/// Hash of the report without its "run" section (timings, cache status).
std::string payload_hash(const nlohmann::json& report);

}  // namespace anosov
