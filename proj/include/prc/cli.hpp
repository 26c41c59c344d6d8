#ifndef PRC_CLI_HPP
#define PRC_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace prc {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitFail = 3;
inline constexpr int kExitInconclusive = 4;

/// Runs the tool with `args` (without the program name). Results go to
/// `out` unless --out is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prc

#endif  // PRC_CLI_HPP
