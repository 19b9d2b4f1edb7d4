#include "twophoton/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace twophoton {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// (-1)^m for a possibly large index.
double alternating(std::size_t m) { return (m & 1U) ? -1.0 : 1.0; }

void check_length(const FrequencyGrid& grid, std::size_t length) {
  if (length != grid.size())
    throw std::invalid_argument("sample count " + std::to_string(length) +
                                " does not match grid size " + std::to_string(grid.size()));
}

}  // namespace

double angular_frequency(double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  return kTwoPi * kSpeedOfLight / wavelength;
}

double wavelength_of(double angular) {
  if (!(angular > 0.0)) throw std::invalid_argument("angular frequency must be positive");
  return kTwoPi * kSpeedOfLight / angular;
}

double angular_bandwidth(double wavelength_width, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  return kTwoPi * kSpeedOfLight * wavelength_width / (wavelength * wavelength);
}

double wavelength_bandwidth(double angular_width, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  return angular_width * wavelength * wavelength / (kTwoPi * kSpeedOfLight);
}

FrequencyGrid::FrequencyGrid(double center, double spacing, std::size_t count)
    : center_(center), spacing_(spacing), count_(count) {
  if (!is_power_of_two(count))
    throw std::invalid_argument("grid count " + std::to_string(count) + " is not a power of two");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw std::invalid_argument("grid spacing must be positive");
  if (!(center - static_cast<double>(count / 2) * spacing > 0.0))
    throw std::invalid_argument("grid extends to non-positive frequencies");
}

std::vector<double> FrequencyGrid::frequencies() const {
  std::vector<double> out(count_);
  for (std::size_t k = 0; k < count_; ++k) out[k] = frequency(k);
  return out;
}

std::vector<double> FrequencyGrid::offsets() const {
  std::vector<double> out(count_);
  for (std::size_t k = 0; k < count_; ++k) out[k] = offset(k);
  return out;
}

std::vector<double> FrequencyGrid::times() const {
  std::vector<double> out(count_);
  for (std::size_t j = 0; j < count_; ++j) out[j] = time(j);
  return out;
}

FrequencyGrid make_grid(double center, double span, std::size_t count) {
  if (!(span > 0.0)) throw std::invalid_argument("grid span must be positive");
  if (!is_power_of_two(count))
    throw std::invalid_argument("grid count " + std::to_string(count) + " is not a power of two");
  return FrequencyGrid(center, span / static_cast<double>(count), count);
}

SpectralField::SpectralField(FrequencyGrid g, ComplexVector a)
    : grid(g), amplitudes(std::move(a)) {
  check_length(grid, amplitudes.size());
}

SpectralField::SpectralField(FrequencyGrid g) : grid(g), amplitudes(g.size()) {}

TemporalField::TemporalField(FrequencyGrid g, ComplexVector s) : grid(g), samples(std::move(s)) {
  check_length(grid, samples.size());
}

// With w_k = (k - N/2) dw and t_j = (j - N/2) dt, exp(-i w_k t_j) factors into
// (-1)^(j+k+N/2) exp(-2 pi i jk/N), so each direction is one FFT plus sign flips.
TemporalField to_time(const SpectralField& field) {
  const auto& g = field.grid;
  const std::size_t n = g.size();
  ComplexVector data(n);
  for (std::size_t k = 0; k < n; ++k) data[k] = field.amplitudes[k] * alternating(k);
  detail::dft_inplace(data, -1);
  const double scale = g.spacing() / std::sqrt(kTwoPi);
  for (std::size_t j = 0; j < n; ++j) data[j] *= scale * alternating(j + n / 2);
  return TemporalField(g, std::move(data));
}

SpectralField to_frequency(const TemporalField& field) {
  const auto& g = field.grid;
  const std::size_t n = g.size();
  ComplexVector data(n);
  for (std::size_t j = 0; j < n; ++j) data[j] = field.samples[j] * alternating(j);
  detail::dft_inplace(data, +1);
  const double scale = g.time_step() / std::sqrt(kTwoPi);
  for (std::size_t k = 0; k < n; ++k) data[k] *= scale * alternating(k + n / 2);
  return SpectralField(g, std::move(data));
}

ComplexVector transform_pair(const FrequencyGrid& grid, std::span<const Complex> values,
                             Direction direction) {
  ComplexVector copy(values.begin(), values.end());
  if (direction == Direction::ToTime)
    return to_time(SpectralField(grid, std::move(copy))).samples;
  return to_frequency(TemporalField(grid, std::move(copy))).amplitudes;
}

Complex envelope_at(const SpectralField& field, double t) {
  const auto& g = field.grid;
  const std::size_t n = g.size();
  // Phase recurrence re-seeded every block to keep rounding drift below 1e-13.
  constexpr std::size_t kBlock = 256;
  const Complex step = std::polar(1.0, -g.spacing() * t);
  Complex sum = 0.0;
  Complex phase;
  for (std::size_t k = 0; k < n; ++k) {
    if (k % kBlock == 0) phase = std::polar(1.0, -g.offset(k) * t);
    sum += field.amplitudes[k] * phase;
    phase *= step;
  }
  return sum * (g.spacing() / std::sqrt(kTwoPi));
}

SpectralField advanced(const SpectralField& field, double delay) {
  SpectralField out(field.grid, field.amplitudes);
  for (std::size_t k = 0; k < out.amplitudes.size(); ++k)
    out.amplitudes[k] *= std::polar(1.0, -field.grid.offset(k) * delay);
  return out;
}

double spectral_energy(const SpectralField& field) {
  Accumulator acc;
  for (const auto& a : field.amplitudes) acc.add(std::norm(a));
  return acc.value() * field.grid.spacing();
}

double temporal_energy(const TemporalField& field) {
  Accumulator acc;
  for (const auto& a : field.samples) acc.add(std::norm(a));
  return acc.value() * field.grid.time_step();
}

double interpolate(std::span<const double> values, double position) {
  const double last = static_cast<double>(values.size()) - 1.0;
  if (values.empty() || position < 0.0 || position > last) return 0.0;
  const auto i = static_cast<std::size_t>(std::floor(position));
  if (i + 1 >= values.size()) return values.back();
  const double frac = position - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

Complex interpolate(std::span<const Complex> values, double position) {
  const double last = static_cast<double>(values.size()) - 1.0;
  if (values.empty() || position < 0.0 || position > last) return 0.0;
  const auto i = static_cast<std::size_t>(std::floor(position));
  if (i + 1 >= values.size()) return values.back();
  const double frac = position - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

void Accumulator::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    correction_ += (sum_ - t) + x;
  else
    correction_ += (x - t) + sum_;
  sum_ = t;
}

double full_width_half_maximum(std::span<const double> axis, std::span<const double> values) {
  if (axis.size() != values.size() || values.size() < 3) return 0.0;
  const auto peak = static_cast<std::size_t>(
      std::distance(values.begin(), std::max_element(values.begin(), values.end())));
  const double half = 0.5 * values[peak];
  if (!(half > 0.0)) return 0.0;
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double f = (values[inside] - half) / (values[inside] - values[outside]);
    return axis[inside] + f * (axis[outside] - axis[inside]);
  };
  std::size_t left = peak;
  while (left > 0 && values[left - 1] >= half) --left;
  std::size_t right = peak;
  while (right + 1 < values.size() && values[right + 1] >= half) ++right;
  if (left == 0 || right + 1 == values.size()) return 0.0;
  return crossing(right, right + 1) - crossing(left, left - 1);
}

}  // namespace twophoton
