#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twophoton/scans.hpp"

namespace twophoton::cli {

// Writes `contents` to a temporary sibling and renames it over `path`, so readers see
// either the old file or the complete new one.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

// Round-trip scientific notation.
std::string format_number(double value);

// Header row, then one line per row of equally long columns.
std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& columns);
std::string csv(const ScanTable& table);

nlohmann::json to_json(const Scenario& scenario);
nlohmann::json to_json(const ScanSpec& spec);

}  // namespace twophoton::cli
