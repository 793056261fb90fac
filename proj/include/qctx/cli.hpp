#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qctx::cli {

/// Runs one CLI invocation. Returns 0 on success, 1 on validation
/// errors, 2 when a size bound rejects the request.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qctx::cli
