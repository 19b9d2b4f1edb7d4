#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "twophoton/scans.hpp"

namespace twophoton::cli {

// What a number with a unit suffix denotes; decides which suffixes are accepted.
enum class Quantity {
  Frequency,  // absolute: nm (vacuum wavelength), rad/s, Hz..THz (times 2 pi)
  Bandwidth,  // width: nm about a reference wavelength, rad/s, Hz..THz (times 2 pi)
  Offset,     // signed frequency shift: rad/s, Hz..THz (times 2 pi)
  Time,       // s, ms, us, ns, ps, fs
  Length,     // m, cm, mm, um
};

// Parses "<number> <unit>" into SI (rad/s, s, m). A bare number is a ConfigError, as
// are unknown or inapplicable units. `reference` is the wavelength (m) that nm widths
// are taken about.
double parse_quantity(const std::string& text, Quantity quantity,
                      std::optional<double> reference = std::nullopt);

struct RunConfig {
  Scenario scenario;
  std::optional<ScanSpec> scan;
  std::string name;  // stem used for output files
  std::string text;  // the configuration as read
  std::filesystem::path source;
};

// Reads a sectioned YAML file. Unknown keys, missing units and malformed values are
// ConfigErrors carrying "file:line: field" context. Relative filter paths resolve
// against the file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& origin);

// Shipped presets live in a directory fixed at build time, overridable through the
// TWOPHOTON_PRESETS environment variable.
std::filesystem::path preset_directory();
std::filesystem::path preset_path(const std::string& name);

}  // namespace twophoton::cli
