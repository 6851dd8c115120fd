#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ssg {

/// Exit codes: 0 success, 1 computation or verification failure, 2 usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssg
