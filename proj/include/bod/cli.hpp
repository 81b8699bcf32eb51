#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bod {

/// Entry point of the `bod` tool. `args` excludes the program name. Prompts,
/// round summaries and diagnostics go to `err`; result CSVs without --output
/// go to `out`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace bod
