#ifndef KCAV_CLI_HPP
#define KCAV_CLI_HPP

// Flat key=value configuration parsing and the command-line entry point.
//
// Config format: one `key=value` pair per line, UTF-8, LF or CRLF endings,
// `#` starts a comment.  Unknown keys are rejected with their line number.

#include <string>
#include <vector>

#include "kcav/sweep.hpp"

namespace kcav {

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

// Splits config text into entries; syntax errors carry line numbers.
std::vector<ConfigEntry> read_config_entries(const std::string& text);

// Resolves entries against the scenario preset they select.  Explicitly set
// keys override the preset; everything else keeps its preset default.
SweepSpec resolve_config(const std::vector<ConfigEntry>& entries);

// Full pipeline: text -> resolved SweepSpec with defaults applied.
SweepSpec parse_config(const std::string& text);

// Exit codes: 0 success, 1 validation error, 2 runtime failure.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, char** argv);

}  // namespace kcav

#endif
