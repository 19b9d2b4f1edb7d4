#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twophoton/errors.hpp"
#include "twophoton/signals.hpp"

namespace twophoton {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::General:
      return "general";
    case Regime::NarrowPump:
      return "narrow_pump";
    case Regime::BroadPump:
      return "broad_pump";
    case Regime::Coincidence:
      return "coincidence";
  }
  return "unknown";
}

std::vector<double> phase_sum(const FrequencyGrid& grid, std::span<const double> signal_phase,
                              std::span<const double> idler_phase, double sum_frequency) {
  if (signal_phase.size() != grid.size() || idler_phase.size() != grid.size())
    throw std::invalid_argument("phase arrays do not match the grid");
  const double last = static_cast<double>(grid.size() - 1);
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double mirror = std::clamp(grid.position(sum_frequency - grid.frequency(k)), 0.0, last);
    out[k] = signal_phase[k] + interpolate(idler_phase, mirror);
  }
  return out;
}

ComplexVector pair_amplitude(const DcSpectrum& dc, std::span<const double> phase,
                             std::span<const Complex> dispersion, double sum_frequency) {
  const std::size_t n = dc.grid.size();
  if (!phase.empty() && phase.size() != n)
    throw std::invalid_argument("phase array does not match the down-conversion grid");
  if (!dispersion.empty() && dispersion.size() != n)
    throw std::invalid_argument("dispersion array does not match the down-conversion grid");
  const auto partner = dc.idler_partner(sum_frequency);
  ComplexVector out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex value = std::sqrt((1.0 + dc.signal[k]) * partner[k]);
    if (!phase.empty()) value *= std::polar(1.0, phase[k]);
    if (!dispersion.empty()) value *= dispersion[k];
    out[k] = value;
  }
  return out;
}

namespace {

double transform_limited_power(const DcSpectrum& dc, double sum_frequency) {
  const auto amplitude = pair_amplitude(dc, {}, {}, sum_frequency);
  Accumulator acc;
  for (const auto& a : amplitude) acc.add(a.real());
  const double p0 = std::pow(acc.value() * dc.grid.spacing(), 2);
  if (!(p0 > 0.0)) throw NumericError("down-converted spectrum has no overlapping pairs");
  return p0;
}

}  // namespace

EffectivePulse effective_pulse(const DcSpectrum& dc, std::span<const double> phase,
                               std::span<const Complex> dispersion,
                               std::span<const double> delays) {
  const double sum = dc.pair_sum_frequency();
  EffectivePulse out;
  out.p0 = transform_limited_power(dc, sum);
  const SpectralField field(dc.grid, pair_amplitude(dc, phase, dispersion, sum));
  out.delays.assign(delays.begin(), delays.end());
  out.values.resize(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i)
    out.values[i] = kTwoPi * std::norm(envelope_at(field, delays[i])) / out.p0;
  return out;
}

EffectivePulse effective_pulse(const DcSpectrum& dc, std::span<const double> phase,
                               std::span<const Complex> dispersion) {
  const double sum = dc.pair_sum_frequency();
  EffectivePulse out;
  out.p0 = transform_limited_power(dc, sum);
  const auto temporal = to_time(SpectralField(dc.grid, pair_amplitude(dc, phase, dispersion, sum)));
  out.delays = dc.grid.times();
  out.values.resize(dc.grid.size());
  for (std::size_t j = 0; j < out.values.size(); ++j)
    out.values[j] = kTwoPi * std::norm(temporal.samples[j]) / out.p0;
  return out;
}

DcStats dc_stats(const DcSpectrum& dc, const InteractionKernel& kernel) {
  if (!(dc.grid == kernel.pair_grid))
    throw std::invalid_argument("down-conversion grid does not match the kernel pair grid");
  double f_peak = 0.0;
  double n_peak = 0.0;
  for (std::size_t k = 0; k < dc.grid.size(); ++k) {
    f_peak = std::max(f_peak, std::abs(kernel.f[k]));
    n_peak = std::max(n_peak, dc.signal[k]);
  }
  if (!(f_peak > 0.0) || !(n_peak > 0.0))
    throw NumericError("kernel or down-converted spectrum is identically zero");
  Accumulator density;
  Complex f_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < dc.grid.size(); ++k)
    if (std::abs(kernel.f[k]) >= 0.5 * f_peak && dc.signal[k] >= 0.5 * n_peak) {
      density.add(dc.signal[k]);
      f_sum += kernel.f[k] * std::polar(1.0, -kernel.filter_phase[k]);
      ++count;
    }
  if (count == 0) throw NumericError("kernel band does not overlap the down-converted band");
  DcStats stats;
  stats.density = density.value() / static_cast<double>(count);
  stats.bandwidth = static_cast<double>(count) * dc.grid.spacing();
  stats.f_avg = f_sum / static_cast<double>(count);
  return stats;
}

}  // namespace twophoton
