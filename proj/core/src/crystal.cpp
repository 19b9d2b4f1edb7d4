#include "twophoton/crystal.hpp"

#include <cmath>
#include <stdexcept>

#include "twophoton/errors.hpp"

namespace twophoton {

double DispersionModel::mismatch(double w) const {
  if (!table.empty()) return table(w);
  const double x = w - reference;
  return constant + x * (linear + x * quadratic);
}

Complex DispersionModel::phase(double w) const { return std::polar(1.0, -mismatch(w) * length); }

DispersionModel load_mismatch_table(const std::filesystem::path& path, double length) {
  if (!(length > 0.0)) throw std::invalid_argument("crystal length must be positive");
  DispersionModel model;
  model.length = length;
  model.table = load_two_column_csv(path);
  return model;
}

ComplexVector dispersion_phase(const DispersionModel& dispersion, const FrequencyGrid& grid) {
  if (!(dispersion.length > 0.0)) throw std::invalid_argument("crystal length must be positive");
  if (!dispersion.table.empty() &&
      !dispersion.table.covers(grid.frequency(0), grid.frequency(grid.size() - 1)))
    throw std::invalid_argument("tabulated mismatch does not cover the grid");
  ComplexVector out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = dispersion.phase(grid.frequency(k));
  return out;
}

double CouplingModel::beta_at(double w) const {
  return beta_table.empty() ? beta : beta_table(w);
}

Complex kappa(const CouplingModel& coupling, const DispersionModel& dispersion, double w) {
  const double b = coupling.beta_at(w);
  const double dk = dispersion.mismatch(w);
  return std::sqrt(Complex(kTwoPi * coupling.mean_flux * b * b - 0.25 * dk * dk, 0.0));
}

Complex sinhc(Complex z) {
  if (std::abs(z) < 1e-4) {
    const Complex z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

double photon_density(const CouplingModel& coupling, const DispersionModel& dispersion, double w,
                      bool phase_matched) {
  const double L = dispersion.length;
  const double b = coupling.beta_at(w);
  if (phase_matched) {
    const double s = std::sinh(std::sqrt(kTwoPi * coupling.mean_flux) * b * L);
    return s * s;
  }
  const Complex k = kappa(coupling, dispersion, w);
  return kTwoPi * coupling.mean_flux * b * b * L * L * std::norm(sinhc(k * L));
}

double coupling_for_density(double n, double mean_flux, double length) {
  if (!(n >= 0.0) || !(mean_flux > 0.0) || !(length > 0.0))
    throw std::invalid_argument("density, flux and length must be positive");
  return std::asinh(std::sqrt(n)) / (std::sqrt(kTwoPi * mean_flux) * length);
}

DcSpectrum::DcSpectrum(FrequencyGrid g, std::vector<double> s, std::vector<double> i)
    : grid(g), signal(std::move(s)), idler(std::move(i)), degenerate_frequency(g.center()) {
  if (signal.size() != grid.size() || idler.size() != grid.size())
    throw std::invalid_argument("density arrays do not match the grid");
  for (std::size_t k = 0; k < signal.size(); ++k)
    if (!(signal[k] >= 0.0) || !(idler[k] >= 0.0) || !std::isfinite(signal[k]) ||
        !std::isfinite(idler[k]))
      throw NumericError("photon densities must be finite and non-negative");
}

std::vector<double> DcSpectrum::idler_partner(double sum_frequency) const {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    out[k] = interpolate(idler, grid.position(sum_frequency - grid.frequency(k)));
  return out;
}

DcSpectrum dc_spectrum(const CouplingModel& coupling, const DispersionModel& dispersion,
                       const FrequencyGrid& grid, bool phase_matched) {
  if (!(dispersion.length > 0.0)) throw std::invalid_argument("crystal length must be positive");
  const double lo = grid.frequency(0);
  const double hi = grid.frequency(grid.size() - 1);
  if (!dispersion.table.empty() && !dispersion.table.covers(lo, hi))
    throw std::invalid_argument("tabulated mismatch does not cover the grid");
  if (!coupling.beta_table.empty() && !coupling.beta_table.covers(lo, hi))
    throw std::invalid_argument("tabulated coupling does not cover the grid");
  const std::size_t n = grid.size();
  std::vector<double> signal(n);
  for (std::size_t k = 0; k < n; ++k)
    signal[k] = photon_density(coupling, dispersion, grid.frequency(k), phase_matched);
  // The idler at w pairs with the signal at 2*center - w, which is grid index n - k.
  std::vector<double> idler(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) idler[k] = signal[n - k];
  return DcSpectrum(grid, std::move(signal), std::move(idler));
}

DcSpectrum flat_dc_spectrum(const FrequencyGrid& grid, double n, double width) {
  if (!(n >= 0.0) || !(width > 0.0)) throw std::invalid_argument("invalid flat band");
  std::vector<double> values(grid.size(), 0.0);
  const double half = 0.5 * width * (1.0 + 1e-12);
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (std::abs(grid.offset(k)) <= half) values[k] = n;
  return DcSpectrum(grid, values, values);
}

DcSpectrum gaussian_dc_spectrum(const FrequencyGrid& grid, double peak, double fwhm) {
  if (!(peak >= 0.0) || !(fwhm > 0.0)) throw std::invalid_argument("invalid Gaussian band");
  std::vector<double> values(grid.size());
  const double a = 4.0 * std::log(2.0) / (fwhm * fwhm);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.offset(k);
    values[k] = peak * std::exp(-a * x * x);
  }
  return DcSpectrum(grid, values, values);
}

double mean_photon_density(const DcSpectrum& dc, Band band) {
  Accumulator acc;
  std::size_t count = 0;
  for (std::size_t k = 0; k < dc.grid.size(); ++k)
    if (std::abs(dc.grid.frequency(k) - band.center) <= 0.5 * band.width) {
      acc.add(dc.signal[k]);
      ++count;
    }
  if (count == 0) throw std::invalid_argument("band contains no grid samples");
  return acc.value() / static_cast<double>(count);
}

}  // namespace twophoton
