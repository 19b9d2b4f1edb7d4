#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace twophoton {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

double angular_frequency(double wavelength);
double wavelength_of(double angular);
// Converts a wavelength width around `wavelength` into an angular-frequency width.
double angular_bandwidth(double wavelength_width, double wavelength);
double wavelength_bandwidth(double angular_width, double wavelength);

// Uniform angular-frequency grid. Sample k sits at center + (k - count/2) * spacing,
// so index count/2 is the center and frequencies increase with k. The conjugate
// time grid has step 2*pi/(count*spacing) with sample j at (j - count/2) * dt.
class FrequencyGrid {
 public:
  FrequencyGrid(double center, double spacing, std::size_t count);

  double center() const { return center_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return count_; }
  double span() const { return spacing_ * static_cast<double>(count_); }

  double offset(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(count_ / 2)) * spacing_;
  }
  double frequency(std::size_t k) const { return center_ + offset(k); }

  double time_step() const { return kTwoPi / span(); }
  double duration() const { return kTwoPi / spacing_; }
  double time(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(count_ / 2)) * time_step();
  }

  std::vector<double> frequencies() const;
  std::vector<double> offsets() const;
  std::vector<double> times() const;

  // Fractional sample position of an absolute angular frequency.
  double position(double angular) const {
    return (angular - center_) / spacing_ + static_cast<double>(count_ / 2);
  }

  bool operator==(const FrequencyGrid&) const = default;

 private:
  double center_;
  double spacing_;
  std::size_t count_;
};

FrequencyGrid make_grid(double center, double span, std::size_t count);

// Amplitude spectral density sampled on a grid, ordered by increasing frequency.
struct SpectralField {
  FrequencyGrid grid;
  ComplexVector amplitudes;

  SpectralField(FrequencyGrid g, ComplexVector a);
  explicit SpectralField(FrequencyGrid g);
};

// Slowly varying envelope relative to the grid center; the full field is
// samples[j] * exp(-i * center * t_j).
struct TemporalField {
  FrequencyGrid grid;
  ComplexVector samples;

  TemporalField(FrequencyGrid g, ComplexVector s);
};

// x(t) = (1/sqrt(2 pi)) \int X(w) exp(-i w t) dw, discretised so that the pair
// below is an exact inverse and preserves sum |.|^2 dw = sum |.|^2 dt.
TemporalField to_time(const SpectralField& field);
SpectralField to_frequency(const TemporalField& field);

enum class Direction { ToTime, ToFrequency };
// Convenience dispatcher; the result lives in the same container type as the input
// but holds samples of the opposite domain.
ComplexVector transform_pair(const FrequencyGrid& grid, std::span<const Complex> values,
                             Direction direction);

// Exact direct sum (1/sqrt(2 pi)) sum_k X_k exp(-i offset_k t) dw for an arbitrary t.
Complex envelope_at(const SpectralField& field, double t);

// Multiplies each bin by exp(-i offset_k * delay); the time envelope becomes x(t + delay).
SpectralField advanced(const SpectralField& field, double delay);

double spectral_energy(const SpectralField& field);
double temporal_energy(const TemporalField& field);

// Linear interpolation of real samples at a fractional index; zero outside [0, n-1].
double interpolate(std::span<const double> values, double position);
Complex interpolate(std::span<const Complex> values, double position);

// Compensated (Neumaier) running sum; order-independent to rounding for our sizes.
class Accumulator {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

// Width at half maximum of a sampled curve, with linear interpolation at the
// crossings nearest the maximum. Returns 0 when a crossing is missing.
double full_width_half_maximum(std::span<const double> axis, std::span<const double> values);

}  // namespace twophoton
