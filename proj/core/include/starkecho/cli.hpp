#pragma once

#include <string>
#include <vector>

namespace starkecho {

// Command-line entry point. Exit codes: 0 success, 1 reproduce with
// failing criteria, 2 usage or schema violation, 3 numerical failure,
// 4 I/O failure. Errors are also emitted as a JSON object on stderr.
int run_cli(const std::vector<std::string>& args);

} // namespace starkecho
