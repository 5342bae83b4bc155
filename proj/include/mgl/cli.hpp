#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgl {

/// Broken internal contract detected at run time (exit code 3).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Runs the command line (args excludes the program name).  Exit codes:
/// 0 ran (an inconclusive verdict included), 2 input error, 3 internal
/// invariant violation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgl
