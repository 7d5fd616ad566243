#ifndef HYPERDP_TOOLS_CLI_HPP
#define HYPERDP_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace hyperdp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs one command line (args excludes the program name). Results go to
/// `out` only when the command succeeds; failures write a single JSON error
/// object to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperdp::cli

#endif  // HYPERDP_TOOLS_CLI_HPP
