#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "output.hpp"
#include "twophoton/errors.hpp"
#include "twophoton/pump.hpp"
#include "twophoton/scans.hpp"
#include "twophoton/signals.hpp"

namespace twophoton::cli {

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool general = false;
  std::optional<std::size_t> ensemble;
  bool closed = false;
};

std::string short_number(double value) {
  std::ostringstream out;
  out.precision(4);
  out << value;
  return out.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

RunConfig resolve(const Options& options) {
  if (options.config.empty() == options.preset.empty())
    throw ConfigError("give exactly one of --config and --preset");
  RunConfig config = options.config.empty() ? load_config(preset_path(options.preset))
                                             : load_config(options.config);
  if (options.seed) config.scenario.seed = *options.seed;
  if (options.general) config.scenario.general = true;
  return config;
}

struct Outputs {
  std::filesystem::path csv;
  std::filesystem::path meta;
};

Outputs write_outputs(const Options& options, const RunConfig& config, const std::string& command,
                      const std::string& body, nlohmann::json extra) {
  const std::filesystem::path dir = options.out;
  std::filesystem::create_directories(dir);
  const std::string stem = config.name + "-" + command;
  Outputs paths{dir / (stem + ".csv"), dir / (stem + ".meta.json")};
  nlohmann::json meta{
      {"command", command},
      {"name", config.name},
      {"created", utc_now()},
      {"source", config.source.string()},
      {"config_text", config.text},
      {"resolved", to_json(config.scenario)},
      {"csv", paths.csv.filename().string()},
  };
  if (config.scan) meta["scan"] = to_json(*config.scan);
  for (auto& [key, value] : extra.items()) meta[key] = value;
  write_atomically(paths.csv, body);
  write_atomically(paths.meta, meta.dump(2) + "\n");
  return paths;
}

std::vector<double> delay_axis(const RunConfig& config) {
  if (config.scan && config.scan->kind == ScanKind::DelaySweep) return config.scan->axis.values();
  return {};
}

int effective_pulse_command(const Options& options, std::ostream& out) {
  const auto config = resolve(options);
  // The delay sweep is reused only when its step resolves the pulse; otherwise sample
  // +-5 pair coherence times 2 pi / Delta finely.
  const double coherence = kTwoPi / config.scenario.down_conversion.bandwidth;
  auto delays = delay_axis(config);
  if (delays.size() < 2 || std::abs(delays[1] - delays[0]) > 0.05 * coherence)
    delays = ScanAxis{-5.0 * coherence, 5.0 * coherence, 1001, false}.values();
  const auto pulse = scenario_effective_pulse(config.scenario, delays);
  const double width = full_width_half_maximum(pulse.delays, pulse.values);
  double peak = 0.0;
  for (double v : pulse.values) peak = std::max(peak, v);
  const auto body = csv({"delay_s", "effective_pulse"}, {pulse.delays, pulse.values});
  const auto paths = write_outputs(options, config, "effective-pulse", body,
                                   {{"fwhm_s", width}, {"p0", pulse.p0}, {"peak", peak}});
  out << "effective pulse: FWHM " << short_number(width * 1e15) << " fs, peak "
      << short_number(peak) << ", " << pulse.values.size() << " delays -> " << paths.csv.string()
      << "\n";
  return kSuccess;
}

int signal_command(const Options& options, std::ostream& out) {
  const auto config = resolve(options);
  const auto& s = config.scenario;
  if (options.closed && resolve_regime(s) == Regime::General)
    throw RegimeError("no closed form is admissible for this configuration");
  auto delays = delay_axis(config);
  if (delays.empty()) delays = {s.delay};
  const auto trace = scenario_signal(s, delays);
  std::vector<double> ratio(trace.axis.size());
  for (std::size_t i = 0; i < ratio.size(); ++i)
    ratio[i] = trace.incoherent[i] != 0.0 ? trace.coherent[i] / trace.incoherent[i]
                                          : std::nan("");
  const auto body = csv({"delay_s", "coherent", "incoherent", "ratio"},
                        {trace.axis, trace.coherent, trace.incoherent, ratio});
  const auto paths = write_outputs(options, config, "signal", body,
                                   {{"regime", to_string(trace.regime)},
                                    {"prefactors", trace.prefactors},
                                    {"warnings", trace.warnings}});
  for (const auto& w : trace.warnings) out << "warning: " << w << "\n";
  out << "signal (" << to_string(trace.regime) << "): coherent " << short_number(trace.coherent[0])
      << ", incoherent " << short_number(trace.incoherent[0]) << " at delay "
      << short_number(trace.axis[0]) << " s, " << trace.axis.size() << " rows -> "
      << paths.csv.string() << "\n";
  return kSuccess;
}

int g2_command(const Options& options, std::ostream& out) {
  const auto config = resolve(options);
  const auto& s = config.scenario;
  if (s.pump.kind != PumpKind::Stochastic)
    throw ConfigError("g2 needs a stochastic pump (pump.kind: stochastic)");
  auto delays = delay_axis(config);
  if (delays.empty()) {
    const double coherence = kTwoPi / s.pump.bandwidth;
    const ScanAxis axis{-4.0 * coherence, 4.0 * coherence, 81, false};
    delays = axis.values();
  }
  const std::size_t members =
      options.ensemble.value_or(config.scan ? config.scan->ensemble_size : 200);
  const auto g2 = pump_g2(scenario_pump(s), scenario_pump_grid(s), delays, members);
  std::vector<double> analytic(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i) analytic[i] = chaotic_g2(s.pump.bandwidth, delays[i]);
  const auto body = csv({"delay_s", "g2", "chaotic_g2"}, {delays, g2, analytic});
  const auto paths = write_outputs(options, config, "g2", body, {{"ensemble", members}});
  std::size_t zero = 0;
  for (std::size_t i = 1; i < delays.size(); ++i)
    if (std::abs(delays[i]) < std::abs(delays[zero])) zero = i;
  out << "g2: " << short_number(g2[zero]) << " at delay " << short_number(delays[zero])
      << " s over " << members << " realizations -> " << paths.csv.string() << "\n";
  return kSuccess;
}

int scan_command(const Options& options, std::ostream& out) {
  auto config = resolve(options);
  if (!config.scan) throw ConfigError(config.source.string() + ": no scan section");
  auto spec = *config.scan;
  if (options.ensemble) spec.ensemble_size = *options.ensemble;
  config.scan = spec;
  const ScanTable table = spec.ensemble_size > 1
                              ? ensemble_average(spec, config.scenario, Reducer::MeanAndStderr)
                              : run_scan(spec, config.scenario);
  const auto paths = write_outputs(options, config, "scan", csv(table),
                                   {{"metadata", table.metadata}, {"warnings", table.warnings},
                                    {"rows", table.rows.size()}});
  for (const auto& w : table.warnings) out << "warning: " << w << "\n";
  out << "scan " << config.name << ": " << to_string(spec.kind) << ", " << table.rows.size()
      << " rows, regime " << table.metadata.at("regime") << " -> " << paths.csv.string() << "\n";
  return kSuccess;
}

int validate_command(const Options& options, std::ostream& out) {
  const auto config = resolve(options);
  const auto& s = config.scenario;
  for (const auto& line : admissibility(s)) out << line << "\n";
  for (const auto& w : pump_warnings(scenario_pump(s))) out << "warning: " << w << "\n";
  scenario_pump_grid(s);
  out << "configuration " << config.name << " is valid; regime " << to_string(resolve_regime(s))
      << "\n";
  return kSuccess;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherent and incoherent two-photon signals of broadband down-converted light",
               "twophoton"};
  app.require_subcommand(1);
  app.fallthrough();
  Options options;
  app.add_option("--config", options.config, "Configuration file (YAML)");
  app.add_option("--preset", options.preset, "Shipped preset name (fig1 ... fig4)");
  app.add_option("--out", options.out, "Output directory")->capture_default_str();
  app.add_option("--seed", options.seed, "Master seed, overriding the configuration");
  app.add_flag("--general", options.general, "Evaluate the integral forms instead of closed forms");
  app.add_option("--ensemble", options.ensemble, "Number of pump realizations")
      ->check(CLI::PositiveNumber);

  auto* pulse = app.add_subcommand("effective-pulse", "Normalised effective pulse P_e(tau)");
  auto* signal = app.add_subcommand("signal", "Coherent and incoherent components versus delay");
  signal->add_flag("--closed", options.closed, "Fail unless a closed form is admissible");
  auto* g2 = app.add_subcommand("g2", "Intensity correlation of the stochastic pump");
  auto* scan = app.add_subcommand("scan", "Parameter sweep described by the scan section");
  auto* validate = app.add_subcommand("validate", "Check units and regime conditions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigFailure;
  }

  try {
    if (pulse->parsed()) return effective_pulse_command(options, out);
    if (signal->parsed()) return signal_command(options, out);
    if (g2->parsed()) return g2_command(options, out);
    if (scan->parsed()) return scan_command(options, out);
    if (validate->parsed()) return validate_command(options, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const RegimeError& e) {
    err << "regime error: " << e.what() << "\n";
    return kRegimeFailure;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUnexpected;
}

}  // namespace twophoton::cli
