// Command-line surface. The CLI body lives in the library so tests can run
// subcommands in-process; tools/lingdist_main.cpp is a thin wrapper.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lingdist {

// Exit codes: 0 success, 1 usage error, 2 data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace lingdist
