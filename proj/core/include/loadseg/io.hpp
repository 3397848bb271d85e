#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace loadseg {

// Writes `content` to a sibling temporary file and renames it over `path`,
// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Splits one CSV line on commas. Quoting is not supported; none of the
// formats produced or consumed here need it.
std::vector<std::string_view> split_csv_line(std::string_view line);

// Shortest round-trip decimal representation; empty string for NaN.
std::string format_double(double v);

// Station CSV files in `dir`, sorted by station id (file stem).
std::vector<std::filesystem::path> list_station_files(
    const std::filesystem::path& dir);

}  // namespace loadseg
