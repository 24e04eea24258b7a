#pragma once

#include <string>
#include <vector>

namespace renoise {

// Exit codes of the command-line front end.
enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitCheck = 4 };

int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

// "a:b:step" or "v1,v2,...".
std::vector<double> parse_grid(const std::string& s);
std::vector<long long> parse_int_list(const std::string& s);

} // namespace renoise
