#include "output.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "twophoton/errors.hpp"

namespace twophoton::cli {

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto temporary = path;
  temporary += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + temporary.string());
    out << contents;
    out.flush();
    if (!out) {
      std::filesystem::remove(temporary);
      throw ConfigError("failed while writing " + temporary.string());
    }
  }
  std::filesystem::rename(temporary, path);
}

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17e", value);
  return buffer;
}

std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw std::invalid_argument("header/column mismatch");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out += (c ? "," : "") + format_number(columns[c].at(r));
    out += "\n";
  }
  return out;
}

std::string csv(const ScanTable& table) {
  std::vector<std::string> header{table.axis_name, "coherent", "incoherent", "ratio"};
  std::vector<std::vector<double>> columns(4);
  const bool errors = !table.rows.empty() && table.rows.front().coherent_stderr.has_value();
  if (errors) {
    header.push_back("coherent_stderr");
    header.push_back("incoherent_stderr");
    columns.resize(6);
  }
  for (const auto& row : table.rows) {
    columns[0].push_back(row.axis);
    columns[1].push_back(row.coherent);
    columns[2].push_back(row.incoherent);
    columns[3].push_back(row.ratio);
    if (errors) {
      columns[4].push_back(*row.coherent_stderr);
      columns[5].push_back(*row.incoherent_stderr);
    }
  }
  return csv(header, columns);
}

nlohmann::json to_json(const Scenario& s) {
  using nlohmann::json;
  const auto& d = s.down_conversion;
  const auto& p = s.pump;
  const auto& k = s.kernel;
  json levels = json::array();
  for (const auto& level : k.levels)
    levels.push_back({{"frequency_rad_per_s", level.frequency},
                      {"width_rad_per_s", level.width},
                      {"coupling", level.coupling}});
  json final_levels = json::array();
  for (const auto& level : k.final_levels)
    final_levels.push_back({{"offset_rad_per_s", level.offset}, {"weight", level.weight}});
  json filters = json::object();
  const auto path = [&](const char* key, const auto& value) {
    if (value) filters[key] = value->string();
  };
  path("signal_phase", s.filters.signal_phase);
  path("idler_phase", s.filters.idler_phase);
  path("signal_transmission", s.filters.signal_transmission);
  path("idler_transmission", s.filters.idler_transmission);
  json out{
      {"down_conversion",
       {{"center_rad_per_s", d.center},
        {"bandwidth_rad_per_s", d.bandwidth},
        {"density", d.density},
        {"shape", d.shape == BandShape::Flat ? "flat" : "gaussian"},
        {"grid_span_rad_per_s", d.span > 0.0 ? d.span : 4.0 * d.bandwidth},
        {"grid_points", d.points},
        {"crystal_length_m", d.crystal_length},
        {"mismatch_linear", d.mismatch_linear},
        {"mismatch_quadratic", d.mismatch_quadratic}}},
      {"pump",
       {{"kind", p.kind == PumpKind::ContinuousWave     ? "cw"
                 : p.kind == PumpKind::TransformLimited ? "pulse"
                                                        : "stochastic"},
        {"center_rad_per_s", p.center > 0.0 ? p.center : 2.0 * d.center},
        {"duration_s", p.duration},
        {"bandwidth_rad_per_s", p.bandwidth},
        {"mean_flux", p.mean_flux},
        {"envelope", p.envelope == EnvelopeShape::Gaussian ? "gaussian" : "flat_top"},
        {"statistics", p.statistics == PumpStatistics::Realization ? "realization" : "expected"},
        {"window_s", p.window},
        {"grid_points", p.points}}},
      {"kernel",
       {{"kind", to_string(k.kind)},
        {"center_rad_per_s", k.center},
        {"bandwidth_rad_per_s", k.bandwidth},
        {"crystal_length_m", k.crystal_length},
        {"levels", levels},
        {"final_levels", final_levels},
        {"inhomogeneous_nodes", k.inhomogeneous_nodes},
        {"gate_time_s", k.gate_time}}},
      {"filters", filters},
      {"regime", to_string(resolve_regime(s))},
      {"general", s.general},
      {"self_mixing", s.self_mixing},
      {"delay_s", s.delay},
      {"seed", s.seed},
  };
  if (k.inhomogeneous_width) out["kernel"]["inhomogeneous_width_rad_per_s"] = *k.inhomogeneous_width;
  if (s.time) out["time_s"] = *s.time;
  return out;
}

nlohmann::json to_json(const ScanSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"start", spec.axis.start},
          {"stop", spec.axis.stop},
          {"points", spec.axis.points},
          {"scale", spec.axis.log ? "log" : "linear"},
          {"ensemble", spec.ensemble_size}};
}

}  // namespace twophoton::cli
