#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdnots::cli {

// Runs `cdnots <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// key = value lines, '#' comments. Keys are flag names without dashes.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace cdnots::cli
