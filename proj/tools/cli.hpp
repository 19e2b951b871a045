#pragma once

#include <iosfwd>

namespace kfdp::cli {

enum ExitCode : int { ok = 0, usage = 1, verify_failed = 2, numeric = 3 };

/// Entry point behind the kfdp binary; writes tables to `out` unless
/// --output is given, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kfdp::cli
