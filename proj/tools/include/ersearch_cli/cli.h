#ifndef ERSEARCH_CLI_CLI_H_
#define ERSEARCH_CLI_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace ersearch::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // bad input, missing files, parse errors
inline constexpr int kUsage = 2;    // unknown flags or values

// Runs one command line (args[0] is the program name).
int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int Run(int argc, char **argv, std::ostream &out, std::ostream &err);

}  // namespace ersearch::cli

#endif  // ERSEARCH_CLI_CLI_H_
