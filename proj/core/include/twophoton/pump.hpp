#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "twophoton/grid.hpp"

namespace twophoton {

// Intensity envelope of a pulse, both with intensity FWHM equal to the duration.
enum class EnvelopeShape {
  Gaussian,  // exp(-4 ln2 t^2 / tau^2)
  FlatTop,   // exp(-ln2 (2t/tau)^8)
};

struct ContinuousWave {
  double mean_flux = 0.0;         // photons/s
  std::optional<double> center;   // rad/s; defaults to the grid center
};

struct TransformLimitedPulse {
  double duration = 0.0;   // s, intensity FWHM
  double peak_flux = 0.0;  // photons/s
  double center = 0.0;     // rad/s
  EnvelopeShape envelope = EnvelopeShape::Gaussian;
};

// Chaotic light: independent circular-Gaussian amplitudes per frequency bin under a
// Gaussian spectral envelope, multiplied in time by a deterministic pulse envelope.
struct StochasticQuasiCw {
  double duration = 0.0;   // s, intensity FWHM of the envelope
  double bandwidth = 0.0;  // rad/s, intensity FWHM of the spectrum
  double mean_flux = 0.0;  // photons/s, averaged over the envelope support
  double center = 0.0;     // rad/s
  std::uint64_t seed = 0;
  EnvelopeShape envelope = EnvelopeShape::Gaussian;
};

using PumpModel = std::variant<ContinuousWave, TransformLimitedPulse, StochasticQuasiCw>;

// Envelope support is where the expected intensity exceeds this fraction of its peak.
inline constexpr double kSupportThreshold = 0.01;
// tau_p * delta_p / (2 pi) below this is rejected, below the second value warned about.
inline constexpr double kQuasiContinuousMinimum = 5.0;
inline constexpr double kQuasiContinuousComfortable = 20.0;

double pump_center(const PumpModel& model, const FrequencyGrid& grid);
// Intensity FWHM of the spectrum; 0 for a monochromatic CW line.
double pump_bandwidth(const PumpModel& model);
double pump_nominal_flux(const PumpModel& model);
PumpModel with_seed(PumpModel model, std::uint64_t seed);
std::uint64_t model_seed(const PumpModel& model);
// Seed of ensemble member `index`, a fixed hash of (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
bool is_stochastic(const PumpModel& model);
// Expected intensity envelope normalised to a unit peak, for an arbitrary time.
double envelope_intensity(const PumpModel& model, double t);

// Non-fatal diagnostics about the model (for example a marginal quasi-continuous ratio).
std::vector<std::string> pump_warnings(const PumpModel& model);

class PumpRealization {
 public:
  PumpRealization(PumpModel model, SpectralField spectral, TemporalField temporal,
                  double expected_peak);

  const PumpModel& model() const { return model_; }
  const FrequencyGrid& grid() const { return spectral_.grid; }
  const SpectralField& spectral() const { return spectral_; }
  const TemporalField& temporal() const { return temporal_; }
  // Time average of |A(t)|^2 over the envelope support.
  double mean_flux() const { return mean_flux_; }

  std::vector<double> intensity() const;
  // |A(t_j + delay)|^2 on the time grid; exact spectral phase ramp, or an index
  // rotation when the delay is a whole number of samples.
  std::vector<double> intensity_advanced(double delay) const;
  // Model expectation <|A(t)|^2> at an arbitrary time.
  double expected_intensity(double t) const;
  std::vector<bool> support(double delay = 0.0) const;

 private:
  PumpModel model_;
  SpectralField spectral_;
  TemporalField temporal_;
  double expected_peak_;
  double mean_flux_;
};

PumpRealization synthesize_pump(const PumpModel& model, const FrequencyGrid& grid);

double pump_mean_flux(const PumpRealization& realization);

// g2(tau) = sum_t <I(t+tau) I(t)> / sum_t <I(t+tau)><I(t)> over the envelope support,
// with the ensemble mean taken over `realizations` seeds derived from the model seed.
std::vector<double> pump_g2(const PumpModel& model, const FrequencyGrid& grid,
                            std::span<const double> delays, std::size_t realizations);

// Ensemble-level pump description used by averaged closed forms.
struct EnsembleStatistics {
  double mean_flux = 0.0;
  double center = 0.0;
  double bandwidth = 0.0;
  std::function<double(double)> g2;                    // of delay
  std::function<double(double)> spectral_density;      // <|A(w)|^2> of absolute frequency
  std::function<double(double)> correlation_integral;  // int <I(t+tau) I(t)> dt / I_p^2
};

// Exact expectations of the model on the given grid.
EnsembleStatistics ensemble_statistics(const PumpModel& model, const FrequencyGrid& grid);

// Order-of-magnitude description of a long or continuous chaotic pump observed over
// `integration_time` (pulse length or final-state lifetime): <|A|^2> peaks at
// integration_time * I_p / bandwidth and int <I I> dt / I_p^2 = integration_time * g2.
EnsembleStatistics integration_time_statistics(double mean_flux, double center,
                                               double bandwidth, double integration_time);

// 1 + |normalised field correlation|^2 for chaotic light with a Gaussian spectrum.
double chaotic_g2(double bandwidth, double delay);

}  // namespace twophoton
