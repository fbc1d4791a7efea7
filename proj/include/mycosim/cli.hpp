#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mycosim {

/**
 * Entry point behind the `mycosim` executable. `args` excludes the program
 * name. Returns 0 on success, 1 when the library reports a domain, file or
 * parse error and 2 on a usage error (unknown subcommand, bad flag, no
 * arguments).
 */
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mycosim
