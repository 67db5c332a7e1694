#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lart::cli {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2 };

/// Entry point of the `lart` tool. Messages go to `out` / `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lart::cli
