#pragma once

#include <iosfwd>

namespace vgmm {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitInfeasible = 3,
  kExitNumerical = 4,
};

/// Entry point of the vgmm-ot command line tool. Machine-readable results go
/// to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vgmm
