#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/run_config.hpp"

namespace deltatrain::cli {

// Computed artifact: named columns, one json array per row, and an optional
// object of summary checks appended after the table.
struct RunTable {
  std::vector<std::string> columns;
  std::vector<nlohmann::ordered_json> rows;
  nlohmann::ordered_json check;
};

// Executes the computation described by a validated config.
RunTable build_table(const RunConfig& config);

// Deterministic renderings.  The CSV carries the config echo as '#'-prefixed
// comment lines above the header row and the checks as trailing comments;
// the json document nests the echo under "config".
std::string render_csv(const RunConfig& config, const RunTable& table);
std::string render_json(const RunConfig& config, const RunTable& table);

// Full run: validate, compute, render, write to config.output (or to `out`
// when the path is empty).  Diagnostics go to `err`.  Returns the process
// exit status: 0 on success, 1 for configuration problems, 2 for numerical
// failures.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace deltatrain::cli
