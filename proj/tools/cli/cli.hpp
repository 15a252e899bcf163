#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jitcluster::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitCapacity = 3;

struct Terminal {
    bool color = false;  // colour the summary prefix
};

/// Runs one subcommand. `args` excludes the program name. Artifacts go to
/// --out (or `out` when absent); the one-line summary and errors go to `err`.
int parse_and_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Terminal terminal = {});

/// Terminal settings for the real process: colour only on a tty without NO_COLOR.
Terminal detect_terminal();

}  // namespace jitcluster::cli
