#pragma once

#include <iosfwd>

namespace relscat::cli {

inline constexpr const char* kToolName = "relscat";
inline constexpr const char* kVersion = "0.1.0";

/// Entry point behind the relscat executable. Exit codes: 0 success with all
/// contracts met, 1 contract violation or computational failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relscat::cli
