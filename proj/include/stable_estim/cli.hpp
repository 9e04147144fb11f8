#pragma once

#include <iosfwd>

namespace stable_estim::cli {

/// Entry point behind the stable-estim executable.
///
/// Exit codes: 0 success, 1 validation report ran with failing checks,
/// 2 invalid input (bad flags, model violating its conditions, alpha out of
/// range) or a computation error; exit-2 paths name the violated condition
/// on the error stream.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stable_estim::cli
