#pragma once

#include <ostream>

namespace loewner::cli {

enum ExitCode : int { ok = 0, input_error = 1, nonconvergence = 2, check_fail = 3, inconclusive = 4 };

/// Entry point of the loewner tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loewner::cli
