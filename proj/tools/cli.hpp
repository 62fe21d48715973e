// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_TOOLS_CLI_HPP
#define FFEM_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ffem::cli
{

enum ExitCode
{
  kPass = 0,
  kCheckFail = 1,
  kUsage = 2,
  kSolverFail = 3
};

// Runs one command; args[0] is the program name. Results go to the files named by the
// flags or to `out`; diagnostics go to `err`.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

// Merges "key=value" lines of a config file into args as --key=value, skipping keys the
// arguments already set.
std::vector<std::string> MergeConfigFile(const std::vector<std::string> &args);

}  // namespace ffem::cli

#endif  // FFEM_TOOLS_CLI_HPP
