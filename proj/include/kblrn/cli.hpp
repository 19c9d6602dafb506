#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kblrn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Subcommands: ingest, mine-rules, fit-numeric, train, eval, predict, prauc.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace kblrn::cli
