#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace lumpchain::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kInputError = 2 };

/// Entry point behind the `lumpchain` binary. args[0] is the program name.
/// JSON goes to `out` (or --out), tables and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from LUMPCHAIN_THREADS; unset means hardware concurrency.
std::size_t thread_count_from_env();

}  // namespace lumpchain::cli
