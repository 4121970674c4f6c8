#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace advperr {

// Runs the command-line front end. Exit codes: 0 success / rule satisfied,
// 2 rule violation detected, 1 usage or IO error.
int cli_run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Resolves a scenario argument: an existing file path, or the name of a
// bundled scenario.
std::string resolve_scenario_path(const std::string& name_or_path);

std::vector<std::string> bundled_scenario_names();

}  // namespace advperr
