#include <cmath>
#include <sstream>
#include <stdexcept>

#include "twophoton/errors.hpp"
#include "twophoton/signals.hpp"

namespace twophoton {

namespace {

std::string format(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

// Support average of a(t) b(t) over samples inside both masks.
double support_mean(const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<bool>& mask_a, const std::vector<bool>& mask_b) {
  Accumulator acc;
  std::size_t count = 0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (mask_a[j] && mask_b[j]) {
      acc.add(a[j] * b[j]);
      ++count;
    }
  if (count == 0) throw NumericError("delayed pump envelope does not overlap its support");
  return acc.value() / static_cast<double>(count);
}

void check_density(const DcStats& dc) {
  if (!(dc.density >= 0.0) || !std::isfinite(dc.density))
    throw std::invalid_argument("photon density must be finite and non-negative");
  if (!(dc.bandwidth > 0.0)) throw std::invalid_argument("overlap bandwidth must be positive");
}

// gamma and delta_p must be separated by the regime margin in the right direction.
void check_regime(Regime regime, const PumpInput& pump, const InteractionKernel& kernel) {
  const double gamma = kernel.bandwidth;
  const double delta = pump.bandwidth();
  switch (regime) {
    case Regime::NarrowPump:
      if (gamma < kRegimeMargin * delta)
        throw RegimeError("narrow-pump closed form needs gamma >= " + format(kRegimeMargin) +
                          " delta_p (gamma/delta_p = " + format(gamma / delta) + ")");
      return;
    case Regime::BroadPump:
      if (delta < kRegimeMargin * gamma)
        throw RegimeError("broad-pump closed form needs delta_p >= " + format(kRegimeMargin) +
                          " gamma (delta_p/gamma = " + format(delta / gamma) + ")");
      return;
    case Regime::General:
    case Regime::Coincidence:
      throw std::invalid_argument(std::string("no closed form for regime ") + to_string(regime));
  }
}

SignalTrace start_trace(Regime regime, const PumpInput& pump, const DcStats& dc,
                        const InteractionKernel& kernel, const EffectivePulse& pulse,
                        std::optional<double> time) {
  SignalTrace trace;
  trace.regime = regime;
  trace.axis = pulse.delays;
  trace.prefactors = kernel.prefactors;
  trace.prefactors["mean_flux"] = pump.mean_flux();
  trace.prefactors["overlap_bandwidth"] = dc.bandwidth;
  trace.prefactors["density"] = dc.density;
  trace.prefactors["f_avg_power"] = std::norm(dc.f_avg);
  trace.metadata["regime"] = to_string(regime);
  trace.metadata["kernel"] = to_string(kernel.kind);
  trace.metadata["pump"] = pump.is_realization() ? "realization" : "ensemble";
  trace.metadata["time"] = time ? format(*time) : "support_average";
  trace.metadata["units"] = "relative";
  return trace;
}

}  // namespace

PumpInput PumpInput::realization(PumpRealization realization) {
  PumpInput input;
  input.realization_ = std::make_shared<const PumpRealization>(std::move(realization));
  return input;
}

PumpInput PumpInput::ensemble(EnsembleStatistics statistics) {
  if (!statistics.g2 || !statistics.spectral_density || !statistics.correlation_integral)
    throw std::invalid_argument("ensemble statistics are incomplete");
  if (!(statistics.mean_flux > 0.0)) throw std::invalid_argument("mean flux must be positive");
  PumpInput input;
  input.statistics_ = std::make_shared<const EnsembleStatistics>(std::move(statistics));
  return input;
}

double PumpInput::mean_flux() const {
  return realization_ ? realization_->mean_flux() : statistics_->mean_flux;
}

double PumpInput::center() const {
  return realization_ ? pump_center(realization_->model(), realization_->grid())
                      : statistics_->center;
}

double PumpInput::bandwidth() const {
  return realization_ ? pump_bandwidth(realization_->model()) : statistics_->bandwidth;
}

double PumpInput::intensity_ratio(std::optional<double> time) const {
  // The support average of I equals I_p by definition of the mean flux.
  if (!realization_ || !time) return 1.0;
  return std::norm(envelope_at(realization_->spectral(), *time)) / realization_->mean_flux();
}

double PumpInput::correlation_ratio(std::optional<double> time, double tau) const {
  if (!realization_) return statistics_->g2(tau);
  const double flux = realization_->mean_flux();
  if (time) {
    const auto& field = realization_->spectral();
    return std::norm(envelope_at(field, *time)) * std::norm(envelope_at(field, *time + tau)) /
           (flux * flux);
  }
  const auto base = realization_->intensity();
  const auto shifted = realization_->intensity_advanced(tau);
  return support_mean(shifted, base, realization_->support(tau), realization_->support()) /
         (flux * flux);
}

double PumpInput::correlation_integral(double tau) const {
  if (!realization_) return statistics_->correlation_integral(tau);
  const auto base = realization_->intensity();
  const auto shifted = realization_->intensity_advanced(tau);
  Accumulator acc;
  for (std::size_t j = 0; j < base.size(); ++j) acc.add(shifted[j] * base[j]);
  const double flux = realization_->mean_flux();
  return acc.value() * realization_->grid().time_step() / (flux * flux);
}

double PumpInput::spectral_density(double w) const {
  if (!realization_) return statistics_->spectral_density(w);
  const auto& spectral = realization_->spectral();
  return std::norm(interpolate(spectral.amplitudes, spectral.grid.position(w)));
}

double response_decay(const InteractionKernel& kernel, double t) {
  if (kernel.kind == KernelKind::Tpa || kernel.kind == KernelKind::TpaNonresonant)
    return t < 0.0 ? 0.0 : std::exp(-2.0 * kernel.bandwidth * t);
  const SpectralField field(kernel.final_grid, kernel.g);
  const double peak = std::norm(envelope_at(field, 0.0));
  if (!(peak > 0.0)) throw NumericError("final-state response vanishes at t = 0");
  return std::norm(envelope_at(field, t)) / peak;
}

SignalTrace coherent_closed(Regime regime, const PumpInput& pump, const DcStats& dc,
                            const InteractionKernel& kernel, const EffectivePulse& pulse,
                            std::optional<double> time, const ClosedFormOptions&) {
  check_density(dc);
  check_regime(regime, pump, kernel);
  SignalTrace trace = start_trace(regime, pump, dc, kernel, pulse, time);
  const double n = dc.density;
  const double pairs = std::norm(dc.f_avg) * dc.bandwidth * dc.bandwidth * (n * n + n);
  double scale = 0.0;
  if (regime == Regime::NarrowPump) {
    const double detuning = pump.center() - kernel.final_center;
    scale = std::norm(kernel.response(detuning)) * pump.intensity_ratio(time);
    trace.prefactors["response_power_at_pump"] = std::norm(kernel.response(detuning));
  } else {
    const double density = pump.spectral_density(kernel.final_center) / pump.mean_flux();
    scale = density * response_decay(kernel, time.value_or(0.0));
    trace.prefactors["pump_spectral_density"] = density;
  }
  trace.coherent.resize(pulse.values.size());
  trace.incoherent.assign(pulse.values.size(), 0.0);
  for (std::size_t i = 0; i < pulse.values.size(); ++i)
    trace.coherent[i] = scale * pairs * pulse.values[i];
  return trace;
}

SignalTrace incoherent_closed(Regime regime, const PumpInput& pump, const DcStats& dc,
                              const InteractionKernel& kernel, const EffectivePulse& pulse,
                              std::optional<double> time, const ClosedFormOptions& options) {
  check_density(dc);
  check_regime(regime, pump, kernel);
  SignalTrace trace = start_trace(regime, pump, dc, kernel, pulse, time);
  const double n = dc.density;
  const double mixing = options.self_mixing ? 2.0 : 1.0;
  const double pairs = mixing * std::norm(dc.f_avg) * dc.bandwidth * n * n;
  trace.prefactors["self_mixing"] = mixing;
  trace.coherent.assign(pulse.delays.size(), 0.0);
  trace.incoherent.resize(pulse.delays.size());
  const double decay = regime == Regime::BroadPump ? response_decay(kernel, time.value_or(0.0)) : 1.0;
  for (std::size_t i = 0; i < pulse.delays.size(); ++i) {
    const double tau = pulse.delays[i];
    trace.incoherent[i] = regime == Regime::NarrowPump
                              ? kernel.g_power * pump.correlation_ratio(time, tau) * pairs
                              : pump.correlation_integral(tau) * pairs * decay;
  }
  if (regime == Regime::NarrowPump) trace.prefactors["g_power"] = kernel.g_power;
  return trace;
}

SignalTrace closed_form(Regime regime, const PumpInput& pump, const DcStats& dc,
                        const InteractionKernel& kernel, const EffectivePulse& pulse,
                        std::optional<double> time, const ClosedFormOptions& options) {
  SignalTrace trace = coherent_closed(regime, pump, dc, kernel, pulse, time, options);
  const SignalTrace incoherent = incoherent_closed(regime, pump, dc, kernel, pulse, time, options);
  trace.incoherent = incoherent.incoherent;
  for (const auto& [key, value] : incoherent.prefactors) trace.prefactors.emplace(key, value);
  return trace;
}

std::vector<double> signal_ratio(Regime regime, const RatioInputs& inputs,
                                 std::span<const double> effective_pulse) {
  const double n = inputs.density;
  if (!(n > 0.0)) throw std::invalid_argument("ratio is undefined for zero photon density");
  if (!(inputs.overlap_bandwidth > 0.0))
    throw std::invalid_argument("overlap bandwidth must be positive");
  if (!(inputs.g2 > 0.0)) throw std::invalid_argument("g2 must be positive");
  double scale = 0.0;
  switch (regime) {
    case Regime::NarrowPump:
      if (!(inputs.final_bandwidth > 0.0))
        throw std::invalid_argument("final-state bandwidth must be positive");
      scale = inputs.overlap_bandwidth / (inputs.final_bandwidth * inputs.g2);
      break;
    case Regime::BroadPump: {
      const double delta = inputs.inhomogeneous_bandwidth.value_or(inputs.pump_bandwidth);
      if (!(delta > 0.0)) throw std::invalid_argument("pump bandwidth must be positive");
      scale = inputs.overlap_bandwidth / (delta * inputs.g2);
      break;
    }
    case Regime::Coincidence:
      if (!(inputs.gate_time > 0.0)) throw std::invalid_argument("gate time must be positive");
      scale = 1.0 / (2.0 * inputs.gate_time * inputs.overlap_bandwidth * inputs.g2);
      break;
    case Regime::General:
      throw std::invalid_argument("no closed-form ratio for the general regime");
  }
  const double occupancy = (n * n + n) / (n * n);
  std::vector<double> out(effective_pulse.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * occupancy * effective_pulse[i];
  return out;
}

SignalTrace coincidence_rates(const PumpInput& pump, const DcStats& dc, double width,
                              double gate_time, const EffectivePulse& pulse,
                              std::optional<double> time) {
  if (!(width > 0.0)) throw std::invalid_argument("coincidence bandwidth must be positive");
  if (!(gate_time > 0.0)) throw std::invalid_argument("gate time must be positive");
  if (gate_time < kGateMargin / width)
    throw RegimeError("gate time must exceed " + format(kGateMargin) +
                      "/Delta (Tg Delta = " + format(gate_time * width) + ")");
  if (!(dc.density >= 0.0)) throw std::invalid_argument("photon density must be non-negative");
  const double n = dc.density;
  SignalTrace trace;
  trace.regime = Regime::Coincidence;
  trace.axis = pulse.delays;
  trace.prefactors["mean_flux"] = pump.mean_flux();
  trace.prefactors["gate_time"] = gate_time;
  trace.prefactors["coincidence_bandwidth"] = width;
  trace.prefactors["coherent_gate_integral"] = 1.0 / width;
  trace.metadata["regime"] = to_string(Regime::Coincidence);
  trace.metadata["pump"] = pump.is_realization() ? "realization" : "ensemble";
  trace.metadata["time"] = time ? format(*time) : "support_average";
  trace.metadata["units"] = "relative";
  const double coherent = pump.intensity_ratio(time) * width * (n * n + n);
  trace.coherent.resize(pulse.values.size());
  trace.incoherent.resize(pulse.values.size());
  for (std::size_t i = 0; i < pulse.values.size(); ++i) {
    trace.coherent[i] = coherent * pulse.values[i];
    trace.incoherent[i] =
        pump.correlation_ratio(time, pulse.delays[i]) * 2.0 * gate_time * width * width * n * n;
  }
  return trace;
}

SignalTrace sfg_excitation_spectrum(const PumpInput& pump, const DcStats& dc,
                                    const InteractionKernel& kernel, double effective_pulse,
                                    double tau) {
  if (kernel.kind != KernelKind::Sfg)
    throw std::invalid_argument("excitation spectra are defined for up-conversion kernels only");
  check_density(dc);
  const double n = dc.density;
  const double flux = pump.mean_flux();
  const double coherent = std::norm(dc.f_avg) * dc.bandwidth * dc.bandwidth * (n * n + n) *
                          effective_pulse / flux;
  const double incoherent =
      std::norm(dc.f_avg) * dc.bandwidth * n * n * pump.correlation_ratio(std::nullopt, tau);
  const auto& grid = kernel.final_grid;
  SignalTrace trace;
  trace.regime = Regime::General;
  trace.prefactors = kernel.prefactors;
  trace.prefactors["mean_flux"] = flux;
  trace.metadata["kernel"] = to_string(kernel.kind);
  trace.metadata["axis"] = "final_detuning";
  trace.metadata["units"] = "relative";
  trace.axis.resize(grid.size());
  trace.coherent.resize(grid.size());
  trace.incoherent.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid.frequency(k);
    const double response = std::norm(kernel.g[k]);
    trace.axis[k] = w - kernel.final_center;
    trace.coherent[k] = coherent * response * pump.spectral_density(w);
    trace.incoherent[k] = incoherent * response;
  }
  return trace;
}

Distribution gaussian_distribution(double center, double width, std::size_t nodes) {
  if (!(width > 0.0)) throw std::invalid_argument("distribution width must be positive");
  if (nodes < 3) throw std::invalid_argument("distribution needs at least three nodes");
  const double sigma = width / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double step = 12.0 * sigma / static_cast<double>(nodes - 1);
  Distribution out;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = -6.0 * sigma + static_cast<double>(i) * step;
    out.nodes.push_back(center + x);
    out.weights.push_back(std::exp(-0.5 * x * x / (sigma * sigma)) * step /
                          (sigma * std::sqrt(kTwoPi)));
  }
  return out;
}

Distribution discrete_distribution(std::vector<double> nodes, std::vector<double> weights) {
  if (nodes.empty() || nodes.size() != weights.size())
    throw std::invalid_argument("distribution nodes and weights must match");
  for (double w : weights)
    if (!(w >= 0.0)) throw std::invalid_argument("distribution weights must be non-negative");
  return Distribution{std::move(nodes), std::move(weights)};
}

SignalTrace inhomogeneous_average(const std::function<SignalTrace(double)>& generator,
                                  const Distribution& distribution) {
  if (distribution.nodes.empty() || distribution.nodes.size() != distribution.weights.size())
    throw std::invalid_argument("distribution nodes and weights must match");
  Accumulator total;
  for (double w : distribution.weights) total.add(w);
  if (std::abs(total.value() - 1.0) > 1e-6)
    throw std::invalid_argument("distribution is not normalised (sum of weights " +
                                format(total.value()) + ")");
  SignalTrace out;
  for (std::size_t i = 0; i < distribution.nodes.size(); ++i) {
    const SignalTrace trace = generator(distribution.nodes[i]);
    const double w = distribution.weights[i];
    if (i == 0) {
      out = trace;
      for (auto& v : out.coherent) v *= w;
      for (auto& v : out.incoherent) v *= w;
      continue;
    }
    if (trace.axis != out.axis) throw std::invalid_argument("traces use different axes");
    for (std::size_t j = 0; j < out.coherent.size(); ++j) {
      out.coherent[j] += w * trace.coherent[j];
      out.incoherent[j] += w * trace.incoherent[j];
    }
    for (const auto& warning : trace.warnings) out.warnings.push_back(warning);
  }
  out.metadata["inhomogeneous_nodes"] = std::to_string(distribution.nodes.size());
  return out;
}

}  // namespace twophoton
