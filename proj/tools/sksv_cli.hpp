#pragma once

#include <iosfwd>

namespace sksv::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCertifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIngestion = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitResource = 5;
inline constexpr int kExitIncompatible = 6;

/// Runs one `sksv` invocation. Reports go to `out`, the run manifest and
/// diagnostics to `err` (or to --manifest when given). Standard input for
/// `update --input -` is read from `in`.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace sksv::cli
