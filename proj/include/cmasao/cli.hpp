#pragma once

#include <string>
#include <vector>

namespace cmasao {

/// Entry point of the command-line tool; args exclude the program name.
/// Exit codes: 0 ok, 1 runtime error, 2 usage error.
int cli_main(const std::vector<std::string>& args);

} // namespace cmasao
