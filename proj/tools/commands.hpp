#pragma once

#include <iosfwd>

#include "leafkit/config.hpp"
#include "leafkit/verify/checks.hpp"

namespace leafkit::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kInputError = 2 };

/// Each command loads and checks every input before it creates the output
/// directory, so a rejected run leaves no files behind.
int cmd_extract(const RunConfig& cfg, std::ostream& out);
int cmd_score(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const verify::VerifyOptions& options, std::ostream& out);

}  // namespace leafkit::cli
