// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace facetlens::app {

/// Runs `facetlens <subcommand> ...`. Returns 0 on success, 1 on pipeline
/// errors (including missing upstream stages) and 2 on usage errors.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace facetlens::app
