#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twophoton/kernels.hpp"
#include "twophoton/pump.hpp"
#include "twophoton/signals.hpp"

namespace twophoton {

enum class ScanKind { PowerSweep, DelaySweep, SfgSpectrum, PumpWavelengthScan, AttenuationSweep };

const char* to_string(ScanKind kind);

struct ScanAxis {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 2;
  bool log = false;

  // Throws std::invalid_argument unless points >= 2 and log bounds are positive.
  void validate() const;
  std::vector<double> values() const;
};

enum class BandShape { Flat, Gaussian };

struct DownConversionSetup {
  double center = 0.0;     // degenerate frequency, rad/s
  double bandwidth = 0.0;  // FWHM, rad/s
  double density = 1.0;    // n at the band centre
  BandShape shape = BandShape::Flat;
  double span = 0.0;  // grid span, rad/s; 0 means four bandwidths
  std::size_t points = std::size_t{1} << 14;
  // Optional mismatch exp(-i dk L) applied to the pairs; dk = c1 x + c2 x^2 about center.
  double crystal_length = 0.0;
  double mismatch_linear = 0.0;
  double mismatch_quadratic = 0.0;
};

enum class PumpKind { ContinuousWave, TransformLimited, Stochastic };
// How a stochastic pump enters the closed forms: sampled realizations, or exact
// expectations of the model.
enum class PumpStatistics { Realization, Expected };

struct PumpSetup {
  PumpKind kind = PumpKind::ContinuousWave;
  double center = 0.0;     // rad/s; 0 means twice the down-conversion centre
  double duration = 0.0;   // s
  double bandwidth = 0.0;  // rad/s, stochastic spectrum FWHM
  double mean_flux = 1.0;  // photons/s; results are relative to it
  EnvelopeShape envelope = EnvelopeShape::Gaussian;
  PumpStatistics statistics = PumpStatistics::Realization;
  double window = 0.0;  // time window of the grid, s; 0 means four durations
  std::size_t points = std::size_t{1} << 14;
};

struct FinalLevel {
  double offset = 0.0;  // from the nominal final-state frequency, rad/s
  double weight = 1.0;  // relative; normalised before use
};

struct KernelSetup {
  KernelKind kind = KernelKind::Sfg;
  double center = 0.0;     // Omega0, rad/s; 0 means the pump centre
  double bandwidth = 0.0;  // gamma_UC, gamma_f, or the coincidence Delta
  double crystal_length = 1e-3;  // up-conversion crystal, m
  std::vector<IntermediateLevel> levels;  // frequencies absolute, rad/s
  std::vector<FinalLevel> final_levels;   // inhomogeneous doublets and the like
  std::optional<double> inhomogeneous_width;  // Gaussian FWHM of Omega0, rad/s
  std::size_t inhomogeneous_nodes = 41;
  double gate_time = 0.0;  // coincidence gate, s
};

struct FilterSetup {
  std::optional<std::filesystem::path> signal_phase;
  std::optional<std::filesystem::path> idler_phase;
  std::optional<std::filesystem::path> signal_transmission;
  std::optional<std::filesystem::path> idler_transmission;
};

enum class RegimeChoice { Auto, NarrowPump, BroadPump, General };

struct Scenario {
  DownConversionSetup down_conversion;
  PumpSetup pump;
  KernelSetup kernel;
  FilterSetup filters;
  RegimeChoice regime = RegimeChoice::Auto;
  bool general = false;      // force the integral forms
  bool self_mixing = false;
  double delay = 0.0;            // tau_i - tau_s for sweeps that do not scan it, s
  std::optional<double> time;    // t - tau_i; support average when absent
  std::uint64_t seed = 0;
};

struct ScanSpec {
  ScanKind kind = ScanKind::PowerSweep;
  ScanAxis axis;
  std::size_t ensemble_size = 1;
};

struct ScanRow {
  double axis = 0.0;
  double coherent = 0.0;
  double incoherent = 0.0;
  double ratio = 0.0;  // coherent / incoherent; NaN when both vanish
  std::optional<double> coherent_stderr;
  std::optional<double> incoherent_stderr;
};

struct ScanTable {
  ScanKind kind = ScanKind::PowerSweep;
  std::string axis_name;
  std::vector<ScanRow> rows;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> warnings;
};

enum class Reducer { Mean, MeanAndStderr };

// The regime a scenario resolves to: the requested one, or by the bandwidth ratio.
Regime resolve_regime(const Scenario& scenario);

// Admissibility report used by `validate`: one line per closed form.
std::vector<std::string> admissibility(const Scenario& scenario);

// The scenario's pump model (seeded with scenario.seed) and the grid it is sampled on.
PumpModel scenario_pump(const Scenario& scenario);
FrequencyGrid scenario_pump_grid(const Scenario& scenario);

// P_e of the scenario's down-converted light with its filter phases and dispersion, at
// `delays`, or on the grid's own delays when `delays` is empty.
EffectivePulse scenario_effective_pulse(const Scenario& scenario, std::span<const double> delays);

// Coherent and incoherent components at each delay tau_i - tau_s for the scenario's own
// density, seed and regime.
SignalTrace scenario_signal(const Scenario& scenario, std::span<const double> delays);

// One evaluation of every axis point with the scenario's own seed. Row failures are
// rethrown with the failing axis value in the message.
ScanTable run_scan(const ScanSpec& spec, const Scenario& scenario);

// Mean (and standard error) over spec.ensemble_size runs whose seeds derive from
// scenario.seed; members are merged in index order.
ScanTable ensemble_average(const ScanSpec& spec, const Scenario& scenario, Reducer reducer);

}  // namespace twophoton
