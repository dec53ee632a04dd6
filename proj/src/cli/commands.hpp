#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace smm::cli {

/// Exit codes: 0 ok, 2 domain error, 3 usage error, 4 solver failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs a complete config, writing outputs and the manifest under output_dir.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Default params of a subcommand; throws InvalidArgument for an unknown one.
nlohmann::json default_params(const std::string& command);

}  // namespace smm::cli
