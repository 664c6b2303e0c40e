#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nestersolve::cli {

/// Runs the command line `args` (without the program name). Results go to
/// `out`; failures are reported on `err` as a JSON object and yield a
/// nonzero return value.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nestersolve::cli
