#pragma once

#include <ostream>

namespace polymix::cli {

enum ExitCode : int {
    ok = 0,
    config_error = 2,
    check_failure = 3,
    numerical_abort = 4,
};

/// Environment variable naming the output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "POLYMIX_OUT_DIR";
inline constexpr int kManifestSchemaVersion = 1;

/// Parses `argv`, dispatches the subcommand and returns its exit code.
/// Reports go to `out`, diagnostics and usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polymix::cli
