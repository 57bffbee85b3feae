#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gestlang::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O and data errors
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. Errors go to `err` as one JSON object
// {"error": {"kind": ..., "message": ...}}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gestlang::cli
