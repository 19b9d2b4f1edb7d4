#include "twophoton/pump.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "twophoton/errors.hpp"

namespace twophoton {

namespace {

const double kLn2 = std::log(2.0);

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double shape_intensity(EnvelopeShape shape, double duration, double t) {
  const double x = t / duration;
  switch (shape) {
    case EnvelopeShape::Gaussian:
      return std::exp(-4.0 * kLn2 * x * x);
    case EnvelopeShape::FlatTop: {
      const double y = 2.0 * x;
      const double y2 = y * y;
      const double y4 = y2 * y2;
      return std::exp(-kLn2 * y4 * y4);
    }
  }
  return 0.0;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument(std::string(what) + " must be positive");
}

void validate(const PumpModel& model) {
  std::visit(Overloaded{
                 [](const ContinuousWave& m) { require_positive(m.mean_flux, "mean flux"); },
                 [](const TransformLimitedPulse& m) {
                   require_positive(m.duration, "pulse duration");
                   require_positive(m.peak_flux, "peak flux");
                   require_positive(m.center, "pump center");
                 },
                 [](const StochasticQuasiCw& m) {
                   require_positive(m.duration, "envelope duration");
                   require_positive(m.bandwidth, "pump bandwidth");
                   require_positive(m.mean_flux, "mean flux");
                   require_positive(m.center, "pump center");
                   const double ratio = m.duration * m.bandwidth / kTwoPi;
                   if (ratio < kQuasiContinuousMinimum) {
                     std::ostringstream os;
                     os << "pulse is not quasi-continuous: duration * bandwidth / 2pi = " << ratio
                        << " < " << kQuasiContinuousMinimum;
                     throw std::invalid_argument(os.str());
                   }
                 },
             },
             model);
}

// Grid extent checks shared by pulsed models.
void require_window(const FrequencyGrid& grid, double duration, double bandwidth, double center) {
  if (grid.duration() < 3.0 * duration)
    throw std::invalid_argument("grid time window is shorter than three pulse durations");
  if (grid.span() < 6.0 * bandwidth)
    throw std::invalid_argument("grid span is narrower than six pump bandwidths");
  const double half = 0.5 * grid.span();
  if (std::abs(center - grid.center()) + 3.0 * bandwidth > half)
    throw std::invalid_argument("pump spectrum does not fit inside the grid");
}

std::vector<double> support_mask_values(const PumpModel& model, const FrequencyGrid& grid) {
  std::vector<double> env(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) env[j] = envelope_intensity(model, grid.time(j));
  return env;
}

double support_mean(const std::vector<double>& env) {
  Accumulator acc;
  std::size_t count = 0;
  for (double e : env)
    if (e > kSupportThreshold) {
      acc.add(e);
      ++count;
    }
  if (count == 0) throw NumericError("pump envelope support is empty on this grid");
  return acc.value() / static_cast<double>(count);
}

}  // namespace

double pump_center(const PumpModel& model, const FrequencyGrid& grid) {
  return std::visit(Overloaded{
                        [&](const ContinuousWave& m) { return m.center.value_or(grid.center()); },
                        [](const TransformLimitedPulse& m) { return m.center; },
                        [](const StochasticQuasiCw& m) { return m.center; },
                    },
                    model);
}

double pump_bandwidth(const PumpModel& model) {
  return std::visit(Overloaded{
                        [](const ContinuousWave&) { return 0.0; },
                        [](const TransformLimitedPulse& m) {
                          // Gaussian time-bandwidth product; the flat-top value is close enough
                          // for grid sizing.
                          return 4.0 * kLn2 / m.duration;
                        },
                        [](const StochasticQuasiCw& m) { return m.bandwidth; },
                    },
                    model);
}

double pump_nominal_flux(const PumpModel& model) {
  return std::visit(Overloaded{
                        [](const ContinuousWave& m) { return m.mean_flux; },
                        [](const TransformLimitedPulse& m) { return m.peak_flux; },
                        [](const StochasticQuasiCw& m) { return m.mean_flux; },
                    },
                    model);
}

PumpModel with_seed(PumpModel model, std::uint64_t seed) {
  if (auto* s = std::get_if<StochasticQuasiCw>(&model)) s->seed = seed;
  return model;
}

std::uint64_t model_seed(const PumpModel& model) {
  if (const auto* s = std::get_if<StochasticQuasiCw>(&model)) return s->seed;
  return 0;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finaliser over a golden-ratio stride.
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool is_stochastic(const PumpModel& model) {
  return std::holds_alternative<StochasticQuasiCw>(model);
}

double envelope_intensity(const PumpModel& model, double t) {
  return std::visit(Overloaded{
                        [](const ContinuousWave&) { return 1.0; },
                        [&](const TransformLimitedPulse& m) {
                          return shape_intensity(m.envelope, m.duration, t);
                        },
                        [&](const StochasticQuasiCw& m) {
                          return shape_intensity(m.envelope, m.duration, t);
                        },
                    },
                    model);
}

std::vector<std::string> pump_warnings(const PumpModel& model) {
  std::vector<std::string> out;
  if (const auto* m = std::get_if<StochasticQuasiCw>(&model)) {
    const double ratio = m->duration * m->bandwidth / kTwoPi;
    if (ratio < kQuasiContinuousComfortable) {
      std::ostringstream os;
      os << "pump is only marginally quasi-continuous (duration * bandwidth / 2pi = " << ratio
         << ")";
      out.push_back(os.str());
    }
  }
  return out;
}

PumpRealization::PumpRealization(PumpModel model, SpectralField spectral, TemporalField temporal,
                                 double expected_peak)
    : model_(std::move(model)),
      spectral_(std::move(spectral)),
      temporal_(std::move(temporal)),
      expected_peak_(expected_peak),
      mean_flux_(0.0) {
  if (!(spectral_.grid == temporal_.grid))
    throw std::invalid_argument("spectral and temporal pump samples use different grids");
  const auto mask = support();
  Accumulator acc;
  std::size_t count = 0;
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) {
      acc.add(std::norm(temporal_.samples[j]));
      ++count;
    }
  if (count == 0) throw NumericError("pump envelope support is empty on this grid");
  mean_flux_ = acc.value() / static_cast<double>(count);
}

std::vector<double> PumpRealization::intensity() const {
  std::vector<double> out(temporal_.samples.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::norm(temporal_.samples[j]);
  return out;
}

std::vector<double> PumpRealization::intensity_advanced(double delay) const {
  const auto& g = grid();
  const double steps = delay / g.time_step();
  const double whole = std::round(steps);
  if (std::abs(steps - whole) < 1e-9) {
    const auto n = static_cast<long long>(g.size());
    const auto shift = static_cast<long long>(whole);
    std::vector<double> out(g.size());
    for (long long j = 0; j < n; ++j) {
      const long long src = ((j + shift) % n + n) % n;
      out[static_cast<std::size_t>(j)] = std::norm(temporal_.samples[static_cast<std::size_t>(src)]);
    }
    return out;
  }
  const auto shifted = to_time(advanced(spectral_, delay));
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::norm(shifted.samples[j]);
  return out;
}

double PumpRealization::expected_intensity(double t) const {
  return expected_peak_ * envelope_intensity(model_, t);
}

std::vector<bool> PumpRealization::support(double delay) const {
  const auto& g = grid();
  std::vector<bool> mask(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double t = g.time(j);
    mask[j] = envelope_intensity(model_, t) > kSupportThreshold &&
              envelope_intensity(model_, t + delay) > kSupportThreshold;
  }
  return mask;
}

PumpRealization synthesize_pump(const PumpModel& model, const FrequencyGrid& grid) {
  validate(model);
  const std::size_t n = grid.size();
  const double center = pump_center(model, grid);

  if (const auto* cw = std::get_if<ContinuousWave>(&model)) {
    const double pos = grid.position(center);
    const double bin = std::round(pos);
    if (std::abs(pos - bin) > 1e-6 || bin < 0.0 || bin >= static_cast<double>(n))
      throw std::invalid_argument("continuous-wave line must sit on a grid bin");
    SpectralField spectral(grid);
    spectral.amplitudes[static_cast<std::size_t>(bin)] =
        std::sqrt(cw->mean_flux) * std::sqrt(kTwoPi) / grid.spacing();
    auto temporal = to_time(spectral);
    return PumpRealization(model, std::move(spectral), std::move(temporal), cw->mean_flux);
  }

  if (const auto* tl = std::get_if<TransformLimitedPulse>(&model)) {
    require_window(grid, tl->duration, pump_bandwidth(model), center);
    ComplexVector samples(n);
    const double detuning = center - grid.center();
    for (std::size_t j = 0; j < n; ++j) {
      const double t = grid.time(j);
      samples[j] = std::sqrt(tl->peak_flux * envelope_intensity(model, t)) *
                   std::polar(1.0, -detuning * t);
    }
    TemporalField temporal(grid, std::move(samples));
    auto spectral = to_frequency(temporal);
    return PumpRealization(model, std::move(spectral), std::move(temporal), tl->peak_flux);
  }

  const auto& sq = std::get<StochasticQuasiCw>(model);
  require_window(grid, sq.duration, sq.bandwidth, center);
  std::mt19937_64 rng(sq.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField noise(grid);
  Accumulator weight;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = (grid.frequency(k) - center) / sq.bandwidth;
    const double amplitude = std::exp(-2.0 * kLn2 * x * x);
    const double re = normal(rng);
    const double im = normal(rng);
    noise.amplitudes[k] = Complex(re, im) * (amplitude / std::sqrt(2.0));
    weight.add(amplitude * amplitude);
  }
  // Stationary expected intensity of the unshaped noise.
  const double stationary = weight.value() * grid.spacing() * grid.spacing() / kTwoPi;
  auto carrier = to_time(noise);
  const auto env = support_mask_values(model, grid);
  const double peak = sq.mean_flux / support_mean(env);
  const double scale = std::sqrt(peak / stationary);
  for (std::size_t j = 0; j < n; ++j) carrier.samples[j] *= scale * std::sqrt(env[j]);
  auto spectral = to_frequency(carrier);
  return PumpRealization(model, std::move(spectral), std::move(carrier), peak);
}

double pump_mean_flux(const PumpRealization& realization) {
  double total = 0.0;
  for (const auto& a : realization.temporal().samples) total += std::norm(a);
  if (!(total > 0.0)) throw NumericError("pump field is identically zero");
  return realization.mean_flux();
}

std::vector<double> pump_g2(const PumpModel& model, const FrequencyGrid& grid,
                            std::span<const double> delays, std::size_t realizations) {
  if (realizations == 0) throw std::invalid_argument("g2 needs at least one realization");
  for (double d : delays)
    if (std::abs(d) >= 0.5 * grid.duration())
      throw std::invalid_argument("delay lies outside the grid time window");
  const std::size_t members = is_stochastic(model) ? realizations : 1;
  const std::uint64_t master = model_seed(model);

  std::vector<Accumulator> numerator(delays.size());
  std::vector<double> denominator(delays.size());
  for (std::size_t r = 0; r < members; ++r) {
    const auto member = is_stochastic(model) ? with_seed(model, derive_seed(master, r)) : model;
    const auto realization = synthesize_pump(member, grid);
    const auto base = realization.intensity();
    for (std::size_t d = 0; d < delays.size(); ++d) {
      const auto shifted = realization.intensity_advanced(delays[d]);
      const auto mask = realization.support(delays[d]);
      Accumulator acc;
      for (std::size_t j = 0; j < base.size(); ++j)
        if (mask[j]) acc.add(shifted[j] * base[j]);
      numerator[d].add(acc.value());
      if (r == 0) {
        Accumulator expected;
        for (std::size_t j = 0; j < base.size(); ++j)
          if (mask[j]) {
            const double t = grid.time(j);
            expected.add(realization.expected_intensity(t + delays[d]) *
                         realization.expected_intensity(t));
          }
        denominator[d] = expected.value();
      }
    }
  }
  std::vector<double> out(delays.size());
  for (std::size_t d = 0; d < delays.size(); ++d) {
    if (!(denominator[d] > 0.0)) throw NumericError("empty overlap of delayed pump envelopes");
    out[d] = numerator[d].value() / static_cast<double>(members) / denominator[d];
  }
  return out;
}

double chaotic_g2(double bandwidth, double delay) {
  const double x = bandwidth * delay;
  return 1.0 + std::exp(-x * x / (8.0 * kLn2));
}

EnsembleStatistics ensemble_statistics(const PumpModel& model, const FrequencyGrid& grid) {
  validate(model);
  EnsembleStatistics s;
  s.center = pump_center(model, grid);
  const auto env = support_mask_values(model, grid);

  if (const auto* sq = std::get_if<StochasticQuasiCw>(&model)) {
    const double peak = sq->mean_flux / support_mean(env);
    Accumulator photons;
    for (double e : env) photons.add(e);
    const double total = photons.value() * peak * grid.time_step();
    const double width = sq->bandwidth;
    const double center = s.center;
    const double norm = width * std::sqrt(kPi / (4.0 * kLn2));
    s.mean_flux = sq->mean_flux;
    s.bandwidth = width;
    s.g2 = [width](double tau) { return chaotic_g2(width, tau); };
    s.spectral_density = [=](double w) {
      const double x = (w - center) / width;
      return total * std::exp(-4.0 * kLn2 * x * x) / norm;
    };
    const double mean = sq->mean_flux;
    const PumpModel copy = model;
    const FrequencyGrid g = grid;
    s.correlation_integral = [=](double tau) {
      Accumulator acc;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double t = g.time(j);
        acc.add(envelope_intensity(copy, t + tau) * envelope_intensity(copy, t));
      }
      return chaotic_g2(width, tau) * acc.value() * g.time_step() * peak * peak / (mean * mean);
    };
    return s;
  }

  // Deterministic fields: expectations are the fields themselves.
  const auto realization = synthesize_pump(model, grid);
  const double mean = realization.mean_flux();
  s.mean_flux = mean;
  s.g2 = [](double) { return 1.0; };
  std::vector<double> density(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    density[k] = std::norm(realization.spectral().amplitudes[k]);
  if (std::holds_alternative<ContinuousWave>(model)) {
    s.bandwidth = 0.0;
  } else {
    s.bandwidth = full_width_half_maximum(grid.offsets(), density);
  }
  s.spectral_density = [density, grid](double w) { return interpolate(density, grid.position(w)); };
  const auto shared = std::make_shared<PumpRealization>(realization);
  s.correlation_integral = [shared, mean](double tau) {
    const auto base = shared->intensity();
    const auto shifted = shared->intensity_advanced(tau);
    Accumulator acc;
    for (std::size_t j = 0; j < base.size(); ++j) acc.add(base[j] * shifted[j]);
    return acc.value() * shared->grid().time_step() / (mean * mean);
  };
  return s;
}

EnsembleStatistics integration_time_statistics(double mean_flux, double center, double bandwidth,
                                               double integration_time) {
  require_positive(mean_flux, "mean flux");
  require_positive(bandwidth, "pump bandwidth");
  require_positive(integration_time, "integration time");
  EnsembleStatistics s;
  s.mean_flux = mean_flux;
  s.center = center;
  s.bandwidth = bandwidth;
  s.g2 = [bandwidth](double tau) { return chaotic_g2(bandwidth, tau); };
  const double peak = integration_time * mean_flux / bandwidth;
  s.spectral_density = [=](double w) {
    const double x = (w - center) / bandwidth;
    return peak * std::exp(-4.0 * kLn2 * x * x);
  };
  s.correlation_integral = [=](double tau) {
    return integration_time * chaotic_g2(bandwidth, tau);
  };
  return s;
}

}  // namespace twophoton
