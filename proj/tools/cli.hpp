#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tai::cli {

// Exit codes: 0 success, 1 usage error, 2 runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tai::cli
