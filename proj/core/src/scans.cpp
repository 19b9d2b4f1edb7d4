#include "twophoton/scans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "twophoton/crystal.hpp"
#include "twophoton/errors.hpp"

namespace twophoton {

namespace {

std::string format(double value) {
  std::ostringstream out;
  out.precision(3);
  out << value;
  return out.str();
}

std::string exact(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

double nominal_pump_center(const Scenario& s) {
  return s.pump.center > 0.0 ? s.pump.center : 2.0 * s.down_conversion.center;
}

double nominal_final_center(const Scenario& s) {
  return s.kernel.center > 0.0 ? s.kernel.center : nominal_pump_center(s);
}

double setup_pump_bandwidth(const PumpSetup& p) {
  switch (p.kind) {
    case PumpKind::ContinuousWave:
      return 0.0;
    case PumpKind::TransformLimited:
      return 4.0 * std::log(2.0) / p.duration;
    case PumpKind::Stochastic:
      return p.bandwidth;
  }
  return 0.0;
}

// Width that the regime conditions compare against the pump bandwidth.
double final_width(const KernelSetup& k) {
  return k.kind == KernelKind::Coincidence ? 2.0 * k.bandwidth : k.bandwidth;
}

FrequencyGrid pump_grid(const Scenario& s) {
  const auto& p = s.pump;
  double window = p.window;
  if (!(window > 0.0)) {
    if (p.kind == PumpKind::ContinuousWave)
      throw std::invalid_argument("a continuous-wave pump needs an explicit grid window");
    window = 4.0 * p.duration;
  }
  return FrequencyGrid(nominal_pump_center(s), kTwoPi / window, p.points);
}

FrequencyGrid dc_grid(const DownConversionSetup& d) {
  if (!(d.center > 0.0) || !(d.bandwidth > 0.0))
    throw std::invalid_argument("down-conversion centre and bandwidth must be positive");
  const double span = d.span > 0.0 ? d.span : 4.0 * d.bandwidth;
  return make_grid(d.center, span, d.points);
}

PumpModel pump_model(const Scenario& s, double center, std::uint64_t seed) {
  const auto& p = s.pump;
  switch (p.kind) {
    case PumpKind::ContinuousWave:
      return ContinuousWave{p.mean_flux, center};
    case PumpKind::TransformLimited:
      return TransformLimitedPulse{p.duration, p.mean_flux, center, p.envelope};
    case PumpKind::Stochastic:
      return StochasticQuasiCw{p.duration, p.bandwidth, p.mean_flux, center, seed, p.envelope};
  }
  throw std::invalid_argument("unknown pump kind");
}

DcSpectrum make_dc(const DownConversionSetup& d, const FrequencyGrid& grid, double density) {
  return d.shape == BandShape::Flat ? flat_dc_spectrum(grid, density, d.bandwidth)
                                    : gaussian_dc_spectrum(grid, density, d.bandwidth);
}

Distribution final_distribution(const Scenario& s) {
  const double center = nominal_final_center(s);
  const auto& k = s.kernel;
  if (k.inhomogeneous_width && !k.final_levels.empty())
    throw std::invalid_argument("give either discrete final levels or a Gaussian width, not both");
  if (k.inhomogeneous_width)
    return gaussian_distribution(center, *k.inhomogeneous_width, k.inhomogeneous_nodes);
  if (k.final_levels.empty()) return discrete_distribution({center}, {1.0});
  double total = 0.0;
  for (const auto& level : k.final_levels) {
    if (!(level.weight > 0.0)) throw std::invalid_argument("final-level weights must be positive");
    total += level.weight;
  }
  std::vector<double> nodes, weights;
  for (const auto& level : k.final_levels) {
    nodes.push_back(center + level.offset);
    weights.push_back(level.weight / total);
  }
  return discrete_distribution(std::move(nodes), std::move(weights));
}

struct Context {
  const Scenario* scenario = nullptr;
  FrequencyGrid final_grid{1.0, 0.25, 2};  // placeholder until make_context
  FrequencyGrid pair_grid{1.0, 0.25, 2};
  std::optional<PumpRealization> realization;
  PumpInput pump;
  Regime regime = Regime::General;
  std::vector<double> pair_phase;
  ComplexVector dispersion;
  std::optional<PhaseFilter> signal_filter;
  std::optional<PhaseFilter> idler_filter;
  Distribution levels;
  std::vector<std::string> warnings;
};

Context make_context(const Scenario& s, double pump_center) {
  Context c;
  c.scenario = &s;
  c.final_grid = pump_grid(s);
  c.pair_grid = dc_grid(s.down_conversion);
  c.regime = resolve_regime(s);
  const PumpModel model = pump_model(s, pump_center, s.seed);
  c.warnings = pump_warnings(model);
  const bool expected = s.pump.kind == PumpKind::Stochastic &&
                        s.pump.statistics == PumpStatistics::Expected;
  if (expected) {
    if (c.regime == Regime::General)
      throw std::invalid_argument("integral forms need sampled pump realizations");
    c.pump = PumpInput::ensemble(ensemble_statistics(model, c.final_grid));
  } else {
    c.realization = synthesize_pump(model, c.final_grid);
    c.pump = PumpInput::realization(*c.realization);
  }
  const auto& f = s.filters;
  if (f.signal_phase || f.idler_phase || f.signal_transmission || f.idler_transmission) {
    c.signal_filter = load_phase_filter(c.pair_grid, f.signal_phase, f.signal_transmission);
    c.idler_filter = load_phase_filter(c.pair_grid, f.idler_phase, f.idler_transmission);
    c.pair_phase = phase_sum(c.pair_grid, c.signal_filter->phase, c.idler_filter->phase,
                             2.0 * s.down_conversion.center);
  }
  const auto& d = s.down_conversion;
  if (d.crystal_length > 0.0) {
    DispersionModel model_dk;
    model_dk.length = d.crystal_length;
    model_dk.reference = d.center;
    model_dk.linear = d.mismatch_linear;
    model_dk.quadratic = d.mismatch_quadratic;
    c.dispersion = dispersion_phase(model_dk, c.pair_grid);
  }
  c.levels = final_distribution(s);
  return c;
}

InteractionKernel build_kernel(const Context& c, double omega0, double transmission) {
  const auto& k = c.scenario->kernel;
  if (!(k.bandwidth > 0.0)) throw std::invalid_argument("kernel bandwidth must be positive");
  auto kernel = [&]() {
    switch (k.kind) {
      case KernelKind::Sfg: {
        DispersionModel final_state;
        final_state.length = k.crystal_length;
        final_state.reference = omega0;
        final_state.linear = mismatch_slope_for_bandwidth(k.bandwidth, k.crystal_length);
        DispersionModel pair;
        pair.length = k.crystal_length;
        CouplingModel coupling;
        coupling.mean_flux = c.scenario->pump.mean_flux;
        coupling.beta = 1.0;
        return sfg_kernel(final_state, pair, coupling, omega0, c.final_grid, c.pair_grid);
      }
      case KernelKind::Tpa:
        if (k.levels.empty())
          throw std::invalid_argument("resonant two-photon absorption needs intermediate levels");
        return tpa_kernel(k.bandwidth, omega0, k.levels, c.final_grid, c.pair_grid);
      case KernelKind::TpaNonresonant:
        return tpa_kernel(k.bandwidth, omega0, {}, c.final_grid, c.pair_grid);
      case KernelKind::Coincidence:
        return coincidence_kernel(k.bandwidth, omega0, c.final_grid, c.pair_grid);
    }
    throw std::invalid_argument("unknown kernel kind");
  }();
  if (c.signal_filter) kernel = apply_filter(kernel, *c.signal_filter, *c.idler_filter);
  if (transmission != 1.0) {
    const auto beam = constant_transmission(c.pair_grid, std::sqrt(transmission));
    kernel = apply_filter(kernel, beam, beam);
  }
  return kernel;
}

SignalTrace general_trace(const Context& c, const DcSpectrum& dc, const InteractionKernel& kernel,
                          std::span<const double> delays) {
  const double offset = c.scenario->time.value_or(0.0);
  SignalTrace out;
  out.regime = Regime::General;
  out.axis.assign(delays.begin(), delays.end());
  for (double tau : delays) {
    const double t[] = {tau + offset};
    auto coherent = coherent_general(*c.realization, dc, kernel, c.dispersion, 0.0, tau, t);
    auto incoherent = incoherent_general(*c.realization, dc, kernel, 0.0, tau, t);
    out.coherent.push_back(coherent.coherent.front());
    out.incoherent.push_back(incoherent.incoherent.front());
    if (out.warnings.empty()) out.warnings = incoherent.warnings;
    out.prefactors = coherent.prefactors;
  }
  return out;
}

// Coherent and incoherent components at the given delays tau_i - tau_s, averaged over the
// final-state distribution.
SignalTrace evaluate(const Context& c, double density, double transmission,
                     std::span<const double> delays) {
  const auto& s = *c.scenario;
  if (!(transmission >= 0.0 && transmission <= 1.0))
    throw std::invalid_argument("transmission must lie in [0, 1]");
  const DcSpectrum dc = make_dc(s.down_conversion, c.pair_grid, density);
  if (transmission == 0.0) {
    SignalTrace zero;
    zero.regime = c.regime;
    zero.axis.assign(delays.begin(), delays.end());
    zero.coherent.assign(delays.size(), 0.0);
    zero.incoherent.assign(delays.size(), 0.0);
    return zero;
  }
  const EffectivePulse pulse = effective_pulse(dc, c.pair_phase, c.dispersion, delays);
  const auto one = [&](double omega0) {
    const auto kernel = build_kernel(c, omega0, transmission);
    if (c.regime == Regime::General) return general_trace(c, dc, kernel, delays);
    const DcStats stats = dc_stats(dc, kernel);
    if (c.regime == Regime::Coincidence)
      return coincidence_rates(c.pump, stats, s.kernel.bandwidth, s.kernel.gate_time, pulse, s.time);
    return closed_form(c.regime, c.pump, stats, kernel, pulse, s.time,
                       ClosedFormOptions{s.self_mixing});
  };
  return inhomogeneous_average(one, c.levels);
}

ScanRow make_row(double axis, double coherent, double incoherent) {
  ScanRow row;
  row.axis = axis;
  row.coherent = coherent;
  row.incoherent = incoherent;
  if (incoherent != 0.0)
    row.ratio = coherent / incoherent;
  else
    row.ratio = coherent == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                : std::numeric_limits<double>::infinity();
  return row;
}

std::string annotate(const char* what, const std::string& axis, const std::string& value) {
  return std::string(what) + " (at " + axis + " = " + value + ")";
}

// Runs `body`, rethrowing failures with the axis value attached and the type preserved.
template <class F>
auto at_axis(const std::string& axis, const std::string& value, F&& body) {
  try {
    return body();
  } catch (const RegimeError& e) {
    throw RegimeError(annotate(e.what(), axis, value));
  } catch (const NumericError& e) {
    throw NumericError(annotate(e.what(), axis, value));
  } catch (const ConfigError& e) {
    throw ConfigError(annotate(e.what(), axis, value));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(annotate(e.what(), axis, value));
  }
}

const char* axis_name(ScanKind kind) {
  switch (kind) {
    case ScanKind::PowerSweep:
      return "density";
    case ScanKind::DelaySweep:
      return "delay_s";
    case ScanKind::SfgSpectrum:
      return "detuning_rad_per_s";
    case ScanKind::PumpWavelengthScan:
      return "pump_offset_rad_per_s";
    case ScanKind::AttenuationSweep:
      return "transmission";
  }
  return "axis";
}

void append_unique(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& w : from)
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
}

}  // namespace

const char* to_string(ScanKind kind) {
  switch (kind) {
    case ScanKind::PowerSweep:
      return "power_sweep";
    case ScanKind::DelaySweep:
      return "delay_sweep";
    case ScanKind::SfgSpectrum:
      return "sfg_spectrum";
    case ScanKind::PumpWavelengthScan:
      return "pump_wavelength_scan";
    case ScanKind::AttenuationSweep:
      return "attenuation_sweep";
  }
  return "unknown";
}

void ScanAxis::validate() const {
  if (points < 2) throw std::invalid_argument("scan axis needs at least two points");
  if (!std::isfinite(start) || !std::isfinite(stop))
    throw std::invalid_argument("scan axis bounds must be finite");
  if (log && (!(start > 0.0) || !(stop > 0.0)))
    throw std::invalid_argument("logarithmic scan axis needs positive bounds");
}

std::vector<double> ScanAxis::values() const {
  validate();
  std::vector<double> out(points);
  const double last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) / last;
    out[i] = log ? std::exp(std::log(start) + u * (std::log(stop) - std::log(start)))
                 : start + u * (stop - start);
  }
  out.front() = start;
  out.back() = stop;
  return out;
}

Regime resolve_regime(const Scenario& s) {
  if (s.kernel.kind == KernelKind::Coincidence) return Regime::Coincidence;
  if (s.general) return Regime::General;
  switch (s.regime) {
    case RegimeChoice::NarrowPump:
      return Regime::NarrowPump;
    case RegimeChoice::BroadPump:
      return Regime::BroadPump;
    case RegimeChoice::General:
      return Regime::General;
    case RegimeChoice::Auto:
      break;
  }
  const double gamma = final_width(s.kernel);
  const double delta = setup_pump_bandwidth(s.pump);
  if (gamma >= kRegimeMargin * delta) return Regime::NarrowPump;
  if (delta >= kRegimeMargin * gamma) return Regime::BroadPump;
  return Regime::General;
}

std::vector<std::string> admissibility(const Scenario& s) {
  const double gamma = final_width(s.kernel);
  const double delta = setup_pump_bandwidth(s.pump);
  std::vector<std::string> out;
  const auto line = [&](const char* name, bool ok, const char* label, double value) {
    out.push_back(std::string(name) + (ok ? " admissible (" : " not admissible (") + label +
                  " ≈ " + format(value) + ", needs ≥ " + format(kRegimeMargin) + ")");
  };
  const double narrow = delta > 0.0 ? gamma / delta : std::numeric_limits<double>::infinity();
  line("NarrowPump", narrow >= kRegimeMargin, "γ/δ_p", narrow);
  line("BroadPump", gamma > 0.0 && delta / gamma >= kRegimeMargin, "δ_p/γ",
       gamma > 0.0 ? delta / gamma : std::numeric_limits<double>::infinity());
  if (s.kernel.kind == KernelKind::Coincidence) {
    const double product = s.kernel.gate_time * s.kernel.bandwidth;
    out.push_back(std::string("Coincidence ") +
                  (product >= kGateMargin ? "admissible" : "not admissible") +
                  " (TgΔ ≈ " + format(product) + ", needs ≥ " +
                  format(kGateMargin) + ")");
  }
  const double broad = s.down_conversion.bandwidth / std::max(delta, gamma);
  out.push_back(std::string("Incoherent factorisation ") +
                (broad >= kRegimeMargin ? "valid" : "approximate") +
                " (Δ/max(δ_p, γ) ≈ " + format(broad) + ")");
  return out;
}

PumpModel scenario_pump(const Scenario& s) {
  return pump_model(s, nominal_pump_center(s), s.seed);
}

FrequencyGrid scenario_pump_grid(const Scenario& s) { return pump_grid(s); }

EffectivePulse scenario_effective_pulse(const Scenario& s, std::span<const double> delays) {
  const auto grid = dc_grid(s.down_conversion);
  const DcSpectrum dc = make_dc(s.down_conversion, grid, s.down_conversion.density);
  std::vector<double> phase;
  ComplexVector dispersion;
  const auto& f = s.filters;
  if (f.signal_phase || f.idler_phase) {
    const auto signal = load_phase_filter(grid, f.signal_phase, std::nullopt);
    const auto idler = load_phase_filter(grid, f.idler_phase, std::nullopt);
    phase = phase_sum(grid, signal.phase, idler.phase, dc.pair_sum_frequency());
  }
  const auto& d = s.down_conversion;
  if (d.crystal_length > 0.0) {
    DispersionModel model;
    model.length = d.crystal_length;
    model.reference = d.center;
    model.linear = d.mismatch_linear;
    model.quadratic = d.mismatch_quadratic;
    dispersion = dispersion_phase(model, grid);
  }
  return delays.empty() ? effective_pulse(dc, phase, dispersion)
                        : effective_pulse(dc, phase, dispersion, delays);
}

SignalTrace scenario_signal(const Scenario& s, std::span<const double> delays) {
  const Context c = make_context(s, nominal_pump_center(s));
  auto trace = evaluate(c, s.down_conversion.density, 1.0, delays);
  append_unique(trace.warnings, c.warnings);
  trace.regime = c.regime;
  return trace;
}

ScanTable run_scan(const ScanSpec& spec, const Scenario& s) {
  spec.axis.validate();
  const auto axis = spec.axis.values();
  const std::string name = axis_name(spec.kind);
  ScanTable table;
  table.kind = spec.kind;
  table.axis_name = name;
  table.metadata["kind"] = to_string(spec.kind);
  table.metadata["regime"] = to_string(resolve_regime(s));
  table.metadata["seed"] = std::to_string(s.seed);

  if (spec.kind == ScanKind::PumpWavelengthScan) {
    for (double x : axis) {
      const auto row = at_axis(name, exact(x), [&] {
        const Context c = make_context(s, nominal_pump_center(s) + x);
        const double delay[] = {s.delay};
        auto trace = evaluate(c, s.down_conversion.density, 1.0, delay);
        append_unique(table.warnings, c.warnings);
        append_unique(table.warnings, trace.warnings);
        return make_row(x, trace.coherent.front(), trace.incoherent.front());
      });
      table.rows.push_back(row);
    }
    return table;
  }

  const Context c = make_context(s, nominal_pump_center(s));
  append_unique(table.warnings, c.warnings);

  switch (spec.kind) {
    case ScanKind::PowerSweep:
    case ScanKind::AttenuationSweep:
      for (double x : axis) {
        const auto row = at_axis(name, exact(x), [&] {
          const double delay[] = {s.delay};
          const bool power = spec.kind == ScanKind::PowerSweep;
          auto trace = evaluate(c, power ? x : s.down_conversion.density, power ? 1.0 : x, delay);
          append_unique(table.warnings, trace.warnings);
          return make_row(x, trace.coherent.front(), trace.incoherent.front());
        });
        table.rows.push_back(row);
      }
      break;
    case ScanKind::DelaySweep: {
      const auto range = "[" + exact(axis.front()) + ", " + exact(axis.back()) + "]";
      const auto trace = at_axis(name, range, [&] {
        return evaluate(c, s.down_conversion.density, 1.0, axis);
      });
      append_unique(table.warnings, trace.warnings);
      for (std::size_t i = 0; i < axis.size(); ++i)
        table.rows.push_back(make_row(axis[i], trace.coherent[i], trace.incoherent[i]));
      break;
    }
    case ScanKind::SfgSpectrum: {
      if (s.kernel.kind != KernelKind::Sfg)
        throw std::invalid_argument("excitation spectra need an up-conversion kernel");
      const auto range = "[" + exact(axis.front()) + ", " + exact(axis.back()) + "]";
      const auto trace = at_axis(name, range, [&] {
        const DcSpectrum dc = make_dc(s.down_conversion, c.pair_grid, s.down_conversion.density);
        const double delay[] = {s.delay};
        const double pe = effective_pulse(dc, c.pair_phase, c.dispersion, delay).values.front();
        const auto kernel = build_kernel(c, nominal_final_center(s), 1.0);
        return sfg_excitation_spectrum(c.pump, dc_stats(dc, kernel), kernel, pe, s.delay);
      });
      const double omega0 = nominal_final_center(s);
      for (double x : axis) {
        const double position = c.final_grid.position(omega0 + x);
        table.rows.push_back(make_row(x, interpolate(trace.coherent, position),
                                      interpolate(trace.incoherent, position)));
      }
      break;
    }
    case ScanKind::PumpWavelengthScan:
      break;
  }
  return table;
}

ScanTable ensemble_average(const ScanSpec& spec, const Scenario& s, Reducer reducer) {
  const std::size_t size = spec.ensemble_size;
  if (size == 0) throw std::invalid_argument("ensemble size must be positive");
  if (reducer == Reducer::MeanAndStderr && size < 2)
    throw std::invalid_argument("a standard error needs at least two ensemble members");
  const bool sampled =
      s.pump.kind == PumpKind::Stochastic && s.pump.statistics == PumpStatistics::Realization;
  const std::size_t members = sampled ? size : 1;

  ScanTable table;
  std::vector<double> m2_coherent, m2_incoherent;
  for (std::size_t i = 0; i < members; ++i) {
    Scenario member = s;
    member.seed = derive_seed(s.seed, i);
    const ScanTable run = run_scan(spec, member);
    if (i == 0) {
      table = run;
      m2_coherent.assign(run.rows.size(), 0.0);
      m2_incoherent.assign(run.rows.size(), 0.0);
      continue;
    }
    append_unique(table.warnings, run.warnings);
    const double count = static_cast<double>(i + 1);
    for (std::size_t r = 0; r < run.rows.size(); ++r) {
      auto& row = table.rows[r];
      const double dc = run.rows[r].coherent - row.coherent;
      row.coherent += dc / count;
      m2_coherent[r] += dc * (run.rows[r].coherent - row.coherent);
      const double di = run.rows[r].incoherent - row.incoherent;
      row.incoherent += di / count;
      m2_incoherent[r] += di * (run.rows[r].incoherent - row.incoherent);
    }
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto& row = table.rows[r];
    row = make_row(row.axis, row.coherent, row.incoherent);
    if (reducer == Reducer::MeanAndStderr) {
      // Deterministic pumps have one distinct member and zero spread.
      const double n = static_cast<double>(members);
      const double scale = members > 1 ? 1.0 / std::sqrt(n * (n - 1.0)) : 0.0;
      row.coherent_stderr = std::sqrt(m2_coherent[r]) * scale;
      row.incoherent_stderr = std::sqrt(m2_incoherent[r]) * scale;
    }
  }
  table.metadata["seed"] = std::to_string(s.seed);
  table.metadata["ensemble_size"] = std::to_string(members);
  return table;
}

}  // namespace twophoton
