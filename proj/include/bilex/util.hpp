#pragma once

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bilex {

// Stage-tagged logging to standard error.
void log_line(std::string_view stage, std::string_view message);
void set_log_enabled(bool enabled);

// Shortest-safe decimal formatting used by all text formats.
std::string format_double(double value);  // shortest form that round-trips
std::string format_float(float value);    // %.9g, round-trips a float

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

double parse_double(std::string_view text, std::string_view what);
float parse_float(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes through a temporary sibling file and renames into place, so a
// failing writer never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

}  // namespace bilex
