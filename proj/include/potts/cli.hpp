#pragma once

// Command-line front end: subcommand dispatch, verification suites and run
// manifests.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace potts::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

struct Check {
  std::string suite;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct VerifyReport {
  std::string suite;
  bool passed = true;
  std::vector<Check> checks;
};

/// Suite names: stationarity, kernel-exactness, duality, coupling-marginals,
/// path-audit, all.  Throws ParameterError on anything else.
VerifyReport verify_suite(const std::string& name, std::uint64_t seed = 1);
std::vector<std::string> suite_names();

nlohmann::json to_json(const VerifyReport& report);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// printf("%.*g") with `digits` significant digits.
std::string format_number(double v, int digits);

int dispatch(int argc, const char* const* argv);

}  // namespace potts::cli
