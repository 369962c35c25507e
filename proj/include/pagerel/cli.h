#pragma once

// Command-line driver. Subcommands: metric, evaluate, design, mde, align,
// simulate. Exit status is 0 on success, 1 for invalid input or a domain
// error, 2 for I/O failures.
//
// PAGEREL_VERBOSE=0 silences warnings on stderr; 2 adds progress notes.

#include <cstdint>
#include <ostream>

namespace pagerel {

inline constexpr uint64_t kDefaultSeed = 20240601;

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pagerel
