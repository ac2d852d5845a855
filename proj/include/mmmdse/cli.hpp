#pragma once

/// @file cli.hpp
/// @brief Command-line front end, callable in-process for tests.

#include "mmmdse/hardware_model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mmmdse::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_other = 1,
    exit_usage = 2,        // bad arguments, spec parse errors, unknown data type, shape errors
    exit_infeasible = 3,   // the requested or searched design violates a constraint
    exit_verification = 4, // simulator output, transfer count or structural check failed
};

/// Accepts "x_c,y_c,x_p,y_p,x_t,y_t,x_b,y_b" or "key=value" pairs (missing keys default to 1).
TileConfig parse_tile_config(const std::string& text);

/// Runs one command: analyze, optimize, sweep, sweep-memory, simulate, layout.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmmdse::cli
