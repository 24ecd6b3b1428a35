#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssqa::cli {

// Parses argv and runs the selected subcommand.  Returns 0 on success, 1 on
// usage/config errors, 2 on runtime failures.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Convenience wrapper for tests; args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssqa::cli
