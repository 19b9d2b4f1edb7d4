#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "twophoton/errors.hpp"
#include "twophoton/grid.hpp"

#ifndef TWOPHOTON_PRESET_DIR
#define TWOPHOTON_PRESET_DIR "presets"
#endif

namespace twophoton::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// Splits "<number> <unit>"; the unit may be empty.
std::pair<double, std::string> split_number(const std::string& text) {
  const std::string s = trim(text);
  const char* begin = s.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || !std::isfinite(value)) throw ConfigError("'" + s + "' is not a number");
  return {value, trim(std::string(end))};
}

const std::map<std::string, double>& hertz_units() {
  static const std::map<std::string, double> units{
      {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}, {"THz", 1e12}};
  return units;
}

class Reader {
 public:
  explicit Reader(std::filesystem::path origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                         const std::string& message) const {
    std::ostringstream out;
    out << origin_.string();
    if (node.Mark().line >= 0) out << ":" << node.Mark().line + 1;
    out << ": field '" << field << "': " << message;
    throw ConfigError(out.str());
  }

  void check_keys(const YAML::Node& map, const std::string& section,
                  const std::set<std::string>& allowed) const {
    if (!map.IsMap()) fail(map, section, "expected a mapping");
    for (const auto& entry : map) {
      const auto key = entry.first.as<std::string>();
      if (!allowed.count(key))
        fail(entry.first, join(section, key), "unknown key");
    }
  }

  static std::string join(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

  std::string scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a scalar value");
    return node.as<std::string>();
  }

  double quantity(const YAML::Node& node, const std::string& field, Quantity kind,
                  std::optional<double> reference = std::nullopt) const {
    try {
      return parse_quantity(scalar(node, field), kind, reference);
    } catch (const ConfigError& e) {
      fail(node, field, e.what());
    }
  }

  double number(const YAML::Node& node, const std::string& field) const {
    try {
      const auto [value, unit] = split_number(scalar(node, field));
      if (!unit.empty()) fail(node, field, "expected a plain number, got unit '" + unit + "'");
      return value;
    } catch (const ConfigError& e) {
      if (std::string(e.what()).find("field '") != std::string::npos) throw;
      fail(node, field, e.what());
    }
  }

  std::size_t count(const YAML::Node& node, const std::string& field) const {
    const double value = number(node, field);
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e12)
      fail(node, field, "expected a positive integer");
    return static_cast<std::size_t>(value);
  }

  bool boolean(const YAML::Node& node, const std::string& field) const {
    const auto text = scalar(node, field);
    if (text == "true") return true;
    if (text == "false") return false;
    fail(node, field, "expected true or false");
  }

  template <class T>
  T choice(const YAML::Node& node, const std::string& field,
           const std::map<std::string, T>& options) const {
    const auto text = scalar(node, field);
    const auto it = options.find(text);
    if (it == options.end()) {
      std::string known;
      for (const auto& [key, value] : options) known += (known.empty() ? "" : ", ") + key;
      fail(node, field, "unknown value '" + text + "' (expected one of " + known + ")");
    }
    return it->second;
  }

  std::filesystem::path file(const YAML::Node& node, const std::string& field) const {
    std::filesystem::path path = scalar(node, field);
    if (path.is_relative()) path = origin_.parent_path() / path;
    if (!std::filesystem::exists(path)) fail(node, field, "file not found: " + path.string());
    return path;
  }

 private:
  std::filesystem::path origin_;
};

void read_down_conversion(const Reader& r, const YAML::Node& n, DownConversionSetup& d) {
  const std::string s = "down_conversion";
  r.check_keys(n, s,
               {"center", "bandwidth", "density", "shape", "grid_points", "grid_span",
                "crystal_length", "mismatch_linear", "mismatch_quadratic"});
  if (!n["center"] || !n["bandwidth"]) r.fail(n, s, "center and bandwidth are required");
  d.center = r.quantity(n["center"], s + ".center", Quantity::Frequency);
  const double wavelength = wavelength_of(d.center);
  d.bandwidth = r.quantity(n["bandwidth"], s + ".bandwidth", Quantity::Bandwidth, wavelength);
  if (n["density"]) d.density = r.number(n["density"], s + ".density");
  if (n["shape"])
    d.shape = r.choice<BandShape>(n["shape"], s + ".shape",
                                  {{"flat", BandShape::Flat}, {"gaussian", BandShape::Gaussian}});
  if (n["grid_points"]) d.points = r.count(n["grid_points"], s + ".grid_points");
  if (n["grid_span"])
    d.span = r.quantity(n["grid_span"], s + ".grid_span", Quantity::Bandwidth, wavelength);
  if (n["crystal_length"])
    d.crystal_length = r.quantity(n["crystal_length"], s + ".crystal_length", Quantity::Length);
  if (n["mismatch_linear"]) d.mismatch_linear = r.number(n["mismatch_linear"], s + ".mismatch_linear");
  if (n["mismatch_quadratic"])
    d.mismatch_quadratic = r.number(n["mismatch_quadratic"], s + ".mismatch_quadratic");
}

void read_pump(const Reader& r, const YAML::Node& n, PumpSetup& p, double dc_center) {
  const std::string s = "pump";
  r.check_keys(n, s,
               {"kind", "center", "duration", "bandwidth", "mean_flux", "envelope", "statistics",
                "grid_points", "window"});
  if (n["kind"])
    p.kind = r.choice<PumpKind>(n["kind"], s + ".kind",
                                {{"cw", PumpKind::ContinuousWave},
                                 {"pulse", PumpKind::TransformLimited},
                                 {"stochastic", PumpKind::Stochastic}});
  if (n["center"]) p.center = r.quantity(n["center"], s + ".center", Quantity::Frequency);
  const double center = p.center > 0.0 ? p.center : 2.0 * dc_center;
  if (n["duration"]) p.duration = r.quantity(n["duration"], s + ".duration", Quantity::Time);
  if (n["bandwidth"])
    p.bandwidth =
        r.quantity(n["bandwidth"], s + ".bandwidth", Quantity::Bandwidth, wavelength_of(center));
  if (n["mean_flux"]) p.mean_flux = r.number(n["mean_flux"], s + ".mean_flux");
  if (n["envelope"])
    p.envelope = r.choice<EnvelopeShape>(
        n["envelope"], s + ".envelope",
        {{"gaussian", EnvelopeShape::Gaussian}, {"flat_top", EnvelopeShape::FlatTop}});
  if (n["statistics"])
    p.statistics = r.choice<PumpStatistics>(
        n["statistics"], s + ".statistics",
        {{"realization", PumpStatistics::Realization}, {"expected", PumpStatistics::Expected}});
  if (n["grid_points"]) p.points = r.count(n["grid_points"], s + ".grid_points");
  if (n["window"]) p.window = r.quantity(n["window"], s + ".window", Quantity::Time);
}

void read_kernel(const Reader& r, const YAML::Node& n, KernelSetup& k, double pump_center) {
  const std::string s = "kernel";
  r.check_keys(n, s,
               {"kind", "center", "bandwidth", "crystal_length", "levels", "final_levels",
                "inhomogeneous_width", "inhomogeneous_nodes", "gate_time"});
  if (n["kind"])
    k.kind = r.choice<KernelKind>(n["kind"], s + ".kind",
                                  {{"sfg", KernelKind::Sfg},
                                   {"tpa", KernelKind::Tpa},
                                   {"tpa_nonresonant", KernelKind::TpaNonresonant},
                                   {"coincidence", KernelKind::Coincidence}});
  if (n["center"]) k.center = r.quantity(n["center"], s + ".center", Quantity::Frequency);
  const double wavelength = wavelength_of(k.center > 0.0 ? k.center : pump_center);
  if (!n["bandwidth"]) r.fail(n, s + ".bandwidth", "required");
  k.bandwidth = r.quantity(n["bandwidth"], s + ".bandwidth", Quantity::Bandwidth, wavelength);
  if (n["crystal_length"])
    k.crystal_length = r.quantity(n["crystal_length"], s + ".crystal_length", Quantity::Length);
  if (const auto levels = n["levels"]) {
    if (!levels.IsSequence()) r.fail(levels, s + ".levels", "expected a list");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto item = levels[i];
      const auto f = s + ".levels[" + std::to_string(i) + "]";
      r.check_keys(item, f, {"frequency", "width", "coupling"});
      if (!item["frequency"] || !item["width"]) r.fail(item, f, "frequency and width are required");
      IntermediateLevel level{};
      level.frequency = r.quantity(item["frequency"], f + ".frequency", Quantity::Frequency);
      level.width = r.quantity(item["width"], f + ".width", Quantity::Bandwidth,
                               wavelength_of(level.frequency));
      level.coupling = item["coupling"] ? r.number(item["coupling"], f + ".coupling") : 1.0;
      k.levels.push_back(level);
    }
  }
  if (const auto levels = n["final_levels"]) {
    if (!levels.IsSequence()) r.fail(levels, s + ".final_levels", "expected a list");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto item = levels[i];
      const auto f = s + ".final_levels[" + std::to_string(i) + "]";
      r.check_keys(item, f, {"offset", "weight"});
      if (!item["offset"]) r.fail(item, f, "offset is required");
      FinalLevel level;
      level.offset = r.quantity(item["offset"], f + ".offset", Quantity::Offset);
      if (item["weight"]) level.weight = r.number(item["weight"], f + ".weight");
      k.final_levels.push_back(level);
    }
  }
  if (n["inhomogeneous_width"])
    k.inhomogeneous_width = r.quantity(n["inhomogeneous_width"], s + ".inhomogeneous_width",
                                       Quantity::Bandwidth, wavelength);
  if (n["inhomogeneous_nodes"])
    k.inhomogeneous_nodes = r.count(n["inhomogeneous_nodes"], s + ".inhomogeneous_nodes");
  if (n["gate_time"]) k.gate_time = r.quantity(n["gate_time"], s + ".gate_time", Quantity::Time);
}

void read_filters(const Reader& r, const YAML::Node& n, FilterSetup& f) {
  const std::string s = "filters";
  r.check_keys(n, s, {"signal_phase", "idler_phase", "signal_transmission", "idler_transmission"});
  if (n["signal_phase"]) f.signal_phase = r.file(n["signal_phase"], s + ".signal_phase");
  if (n["idler_phase"]) f.idler_phase = r.file(n["idler_phase"], s + ".idler_phase");
  if (n["signal_transmission"])
    f.signal_transmission = r.file(n["signal_transmission"], s + ".signal_transmission");
  if (n["idler_transmission"])
    f.idler_transmission = r.file(n["idler_transmission"], s + ".idler_transmission");
}

ScanSpec read_scan(const Reader& r, const YAML::Node& n) {
  const std::string s = "scan";
  r.check_keys(n, s, {"kind", "start", "stop", "points", "scale", "ensemble"});
  if (!n["kind"] || !n["start"] || !n["stop"] || !n["points"])
    r.fail(n, s, "kind, start, stop and points are required");
  ScanSpec spec;
  spec.kind = r.choice<ScanKind>(n["kind"], s + ".kind",
                                 {{"power_sweep", ScanKind::PowerSweep},
                                  {"delay_sweep", ScanKind::DelaySweep},
                                  {"sfg_spectrum", ScanKind::SfgSpectrum},
                                  {"pump_wavelength_scan", ScanKind::PumpWavelengthScan},
                                  {"attenuation_sweep", ScanKind::AttenuationSweep}});
  const auto bound = [&](const char* key) {
    const auto node = n[key];
    const auto field = s + "." + key;
    switch (spec.kind) {
      case ScanKind::PowerSweep:
      case ScanKind::AttenuationSweep:
        return r.number(node, field);
      case ScanKind::DelaySweep:
        return r.quantity(node, field, Quantity::Time);
      case ScanKind::SfgSpectrum:
      case ScanKind::PumpWavelengthScan:
        return r.quantity(node, field, Quantity::Offset);
    }
    return 0.0;
  };
  spec.axis.start = bound("start");
  spec.axis.stop = bound("stop");
  spec.axis.points = r.count(n["points"], s + ".points");
  if (n["scale"])
    spec.axis.log = r.choice<bool>(n["scale"], s + ".scale", {{"linear", false}, {"log", true}});
  if (n["ensemble"]) spec.ensemble_size = r.count(n["ensemble"], s + ".ensemble");
  try {
    spec.axis.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(n, s, e.what());
  }
  return spec;
}

}  // namespace

double parse_quantity(const std::string& text, Quantity quantity, std::optional<double> reference) {
  const auto [value, unit] = split_number(text);
  if (unit.empty()) throw ConfigError("'" + trim(text) + "' has no unit suffix");
  const auto reject = [&]() -> double {
    throw ConfigError("unit '" + unit + "' does not apply here");
  };
  switch (quantity) {
    case Quantity::Frequency:
    case Quantity::Bandwidth:
    case Quantity::Offset: {
      if (unit == "rad/s") return value;
      if (const auto it = hertz_units().find(unit); it != hertz_units().end())
        return kTwoPi * value * it->second;
      if (unit == "nm") {
        if (quantity == Quantity::Frequency) {
          if (!(value > 0.0)) throw ConfigError("wavelength must be positive");
          return angular_frequency(value * 1e-9);
        }
        if (quantity == Quantity::Bandwidth) {
          if (!reference) throw ConfigError("a width in nm needs a reference wavelength");
          return angular_bandwidth(value * 1e-9, *reference);
        }
        throw ConfigError("signed offsets take frequency units (rad/s, Hz, MHz, GHz)");
      }
      return reject();
    }
    case Quantity::Time: {
      static const std::map<std::string, double> units{
          {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}};
      const auto it = units.find(unit);
      return it == units.end() ? reject() : value * it->second;
    }
    case Quantity::Length: {
      static const std::map<std::string, double> units{
          {"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}};
      const auto it = units.find(unit);
      return it == units.end() ? reject() : value * it->second;
    }
  }
  return reject();
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& origin) {
  const Reader r(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin.string() + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  r.check_keys(root, "",
               {"name", "seed", "regime", "general", "self_mixing", "delay", "time",
                "down_conversion", "pump", "kernel", "filters", "scan"});
  RunConfig config;
  config.text = text;
  config.source = origin;
  config.name = root["name"] ? r.scalar(root["name"], "name") : origin.stem().string();
  auto& s = config.scenario;
  if (!root["down_conversion"] || !root["kernel"])
    r.fail(root, "", "sections down_conversion and kernel are required");
  read_down_conversion(r, root["down_conversion"], s.down_conversion);
  if (root["pump"]) read_pump(r, root["pump"], s.pump, s.down_conversion.center);
  const double pump_center = s.pump.center > 0.0 ? s.pump.center : 2.0 * s.down_conversion.center;
  read_kernel(r, root["kernel"], s.kernel, pump_center);
  if (root["filters"]) read_filters(r, root["filters"], s.filters);
  if (root["seed"]) {
    const double seed = r.number(root["seed"], "seed");
    if (!(seed >= 0.0) || seed != std::floor(seed) || seed >= 1.8e19)
      r.fail(root["seed"], "seed", "expected a non-negative integer");
    s.seed = std::stoull(r.scalar(root["seed"], "seed"));
  }
  if (root["regime"])
    s.regime = r.choice<RegimeChoice>(root["regime"], "regime",
                                      {{"auto", RegimeChoice::Auto},
                                       {"narrow_pump", RegimeChoice::NarrowPump},
                                       {"broad_pump", RegimeChoice::BroadPump},
                                       {"general", RegimeChoice::General}});
  if (root["general"]) s.general = r.boolean(root["general"], "general");
  if (root["self_mixing"]) s.self_mixing = r.boolean(root["self_mixing"], "self_mixing");
  if (root["delay"]) s.delay = r.quantity(root["delay"], "delay", Quantity::Time);
  if (root["time"]) s.time = r.quantity(root["time"], "time", Quantity::Time);
  if (root["scan"]) config.scan = read_scan(r, root["scan"]);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("TWOPHOTON_PRESETS"); env && *env) return env;
  const std::filesystem::path source = TWOPHOTON_PRESET_DIR;
  if (std::filesystem::is_directory(source)) return source;
  // Installed layout: <prefix>/bin/twophoton next to <prefix>/share/twophoton/presets.
  std::error_code ec;
  const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) return exe.parent_path().parent_path() / "share" / "twophoton" / "presets";
  return source;
}

std::filesystem::path preset_path(const std::string& name) {
  const auto path = preset_directory() / (name + ".yaml");
  if (!std::filesystem::exists(path))
    throw ConfigError("unknown preset '" + name + "' (looked in " + preset_directory().string() + ")");
  return path;
}

}  // namespace twophoton::cli
