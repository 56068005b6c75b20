#pragma once

#include "dftr/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dftr {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSteady = 3,
  kExitIntegration = 4,
  kExitSweep = 5,
  kExitVerify = 6,
};

struct CliRequest {
  std::string command;  ///< steady | simulate | sweep | verify
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir = ".";
  std::vector<double> n_list{0.5, 1.0, 2.0, 10.0};
  std::vector<double> alpha_list{0.0, 0.25, 0.5};
  std::uint64_t seed = 12345;
  unsigned threads = 1;  ///< sweep parallelism cap
};

/// Loads the configuration and runs one command. Data files go to out_dir,
/// a summary to `out`, diagnostics to `err`. Returns an ExitCode.
int run(const CliRequest& request, std::ostream& out, std::ostream& err);

/// Settings from the config file, or the built-in defaults without one.
RunSettings load_settings(const std::optional<std::filesystem::path>& config_path);

/// One row of verify.csv.
struct VerifyRow {
  std::string check;
  std::string metric;
  std::optional<double> value;      ///< empty when the check could not run
  double threshold = 0.0;
  std::string pass;                 ///< true | false | insufficient-resolution
  std::string note;                 ///< diagnostic text, not written to the CSV
};

/// The oracle suite behind `verify`.
std::vector<VerifyRow> verify_checks(const RunSettings& settings, std::uint64_t seed);

}  // namespace dftr
