#pragma once

#include <iosfwd>

namespace toneforge::cli {

// Runs one verb. Exit codes: 0 success, 1 pipeline error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace toneforge::cli
