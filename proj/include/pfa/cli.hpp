#pragma once

namespace pfa::cli {

/// Entry point shared by the `pfa` binary and the test harness.
/// Exit codes: 0 success, 1 usage error, 2 data/runtime error.
int run(int argc, const char* const* argv);

}  // namespace pfa::cli
