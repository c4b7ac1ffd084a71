#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankident {

// Command-line entry point. Exit codes: 0 success, 1 usage error, 2 data
// error, 3 computation error. Reports go to `out` (or --out), messages to
// `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankident
