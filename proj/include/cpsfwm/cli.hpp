#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpsfwm::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    config_error = 2,
    convergence_error = 3,
    physics_error = 4,
};

/// Name of the environment variable holding the default output directory.
inline constexpr const char* out_dir_env = "CPSFWM_OUT_DIR";

/// Runs one command line (args excludes the program name). Diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpsfwm::cli
