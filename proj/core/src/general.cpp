#include <cmath>
#include <sstream>
#include <stdexcept>

#include "twophoton/errors.hpp"
#include "twophoton/signals.hpp"

namespace twophoton {

namespace {

void check_grids(const PumpRealization& pump, const DcSpectrum& dc,
                 const InteractionKernel& kernel) {
  if (!(pump.grid() == kernel.final_grid))
    throw std::invalid_argument("pump grid does not match the kernel final-state grid");
  if (!(dc.grid == kernel.pair_grid))
    throw std::invalid_argument("down-conversion grid does not match the kernel pair grid");
}

SignalTrace start_trace(const PumpRealization& pump, const InteractionKernel& kernel,
                        std::span<const double> times, double tau_s, double tau_i) {
  SignalTrace trace;
  trace.regime = Regime::General;
  trace.axis.assign(times.begin(), times.end());
  trace.coherent.assign(times.size(), 0.0);
  trace.incoherent.assign(times.size(), 0.0);
  trace.prefactors = kernel.prefactors;
  trace.prefactors["mean_flux"] = pump.mean_flux();
  trace.prefactors["tau_s"] = tau_s;
  trace.prefactors["tau_i"] = tau_i;
  trace.metadata["regime"] = to_string(Regime::General);
  trace.metadata["kernel"] = to_string(kernel.kind);
  trace.metadata["units"] = "relative";
  return trace;
}

std::string format(double value) {
  std::ostringstream out;
  out.precision(4);
  out << value;
  return out.str();
}

}  // namespace

SignalTrace coherent_general(const PumpRealization& pump, const DcSpectrum& dc,
                             const InteractionKernel& kernel, std::span<const Complex> dispersion,
                             double tau_s, double tau_i, std::span<const double> times) {
  check_grids(pump, dc, kernel);
  SignalTrace trace = start_trace(pump, kernel, times, tau_s, tau_i);

  ComplexVector driven(kernel.final_grid.size());
  for (std::size_t k = 0; k < driven.size(); ++k)
    driven[k] = kernel.g[k] * pump.spectral().amplitudes[k];
  const SpectralField final_field(kernel.final_grid, std::move(driven));

  auto pairs = pair_amplitude(dc, {}, dispersion, kernel.final_center);
  for (std::size_t k = 0; k < pairs.size(); ++k) pairs[k] *= kernel.f[k];
  const SpectralField pair_field(dc.grid, std::move(pairs));
  const double pair_term = kTwoPi * std::norm(envelope_at(pair_field, tau_i - tau_s));
  trace.prefactors["pair_term"] = pair_term;

  const double flux = pump.mean_flux();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double drive = std::norm(envelope_at(final_field, times[i] - tau_i));
    trace.coherent[i] = drive / flux * pair_term;
  }
  return trace;
}

SignalTrace incoherent_general(const PumpRealization& pump, const DcSpectrum& dc,
                               const InteractionKernel& kernel, double tau_s, double tau_i,
                               std::span<const double> times) {
  check_grids(pump, dc, kernel);
  const auto& grid = kernel.final_grid;
  if (grid.size() > kMaxGeneralGrid)
    throw NumericError("general incoherent path refuses grids above " +
                       std::to_string(kMaxGeneralGrid) + " samples");
  SignalTrace trace = start_trace(pump, kernel, times, tau_s, tau_i);

  // Loose response: a decay time comparable to the window wraps around circularly.
  const double window = grid.duration();
  if (kernel.bandwidth * window < 20.0)
    trace.warnings.push_back("final-state response time is not short compared with the time "
                             "window (gamma T = " + format(kernel.bandwidth * window) +
                             "); the response wraps around the window");
  const double delta_p = pump_bandwidth(pump.model());
  const double floor = kRegimeMargin * std::max(delta_p, kernel.bandwidth);
  if (kernel.overlap_bandwidth < floor)
    trace.warnings.push_back("down-converted overlap band is not broad compared with the pump "
                             "and final-state widths; the incoherent factorisation is approximate");

  const auto partner = dc.idler_partner(kernel.final_center);
  Accumulator pair_weight;
  for (std::size_t k = 0; k < dc.grid.size(); ++k)
    pair_weight.add(std::norm(kernel.f[k]) * dc.signal[k] * partner[k]);
  const double u = pair_weight.value() * dc.grid.spacing();
  trace.prefactors["pair_weight"] = u;

  const auto& base = pump.temporal().samples;
  const auto shifted = to_time(advanced(pump.spectral(), tau_i - tau_s)).samples;
  ComplexVector conj_g(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) conj_g[k] = std::conj(kernel.g[k]);

  const double flux = pump.mean_flux();
  const double norm = u / (kTwoPi * flux * kTwoPi * flux);
  ComplexVector ramped(grid.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i] - tau_i;
    for (std::size_t k = 0; k < grid.size(); ++k)
      ramped[k] = conj_g[k] * std::polar(1.0, grid.offset(k) * t);
    const auto response = to_time(SpectralField(grid, ramped)).samples;
    ComplexVector product(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
      product[j] = shifted[j] * base[j] * std::conj(response[j]);
    const auto spectrum = to_frequency(TemporalField(grid, std::move(product))).amplitudes;
    Accumulator acc;
    for (const auto& c : spectrum) acc.add(kTwoPi * kTwoPi * std::norm(c));
    trace.incoherent[i] = norm * acc.value() * grid.spacing();
  }
  return trace;
}

}  // namespace twophoton
