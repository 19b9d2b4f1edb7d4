#pragma once

#include <filesystem>
#include <vector>

#include "twophoton/grid.hpp"
#include "twophoton/tabulated.hpp"

namespace twophoton {

// Phase mismatch dk(w) = c0 + c1 (w - reference) + c2 (w - reference)^2 in 1/m, or a
// tabulated dk(w) when `table` is non-empty.
struct DispersionModel {
  double length = 0.0;     // m
  double reference = 0.0;  // rad/s
  double constant = 0.0;
  double linear = 0.0;
  double quadratic = 0.0;
  Tabulated table;

  double mismatch(double w) const;
  // exp(-i dk(w) L).
  Complex phase(double w) const;
};

DispersionModel load_mismatch_table(const std::filesystem::path& path, double length);

// exp(-i dk L) on every grid frequency; throws if a table does not cover the grid.
ComplexVector dispersion_phase(const DispersionModel& dispersion, const FrequencyGrid& grid);

// Nonlinear coupling beta(w), constant unless a table is supplied, and the pump flux.
struct CouplingModel {
  double mean_flux = 0.0;  // photons/s
  double beta = 0.0;
  Tabulated beta_table;

  double beta_at(double w) const;
};

// Principal root of 2 pi I_p beta^2 - dk^2 / 4; imaginary outside the gain band.
Complex kappa(const CouplingModel& coupling, const DispersionModel& dispersion, double w);

// sinh(z)/z with its Taylor series near zero.
Complex sinhc(Complex z);

// Normalised photon density at one frequency. With `phase_matched` the mismatch is
// ignored and n = sinh^2(sqrt(2 pi I_p) beta L); otherwise
// n = 2 pi I_p beta^2 L^2 |sinh(kappa L)/(kappa L)|^2, which coincides at dk = 0.
double photon_density(const CouplingModel& coupling, const DispersionModel& dispersion, double w,
                      bool phase_matched);

// Constant beta that yields density n under phase matching.
double coupling_for_density(double n, double mean_flux, double length);

// Signal and idler densities sampled on one grid centred on the degenerate frequency.
struct DcSpectrum {
  FrequencyGrid grid;
  std::vector<double> signal;
  std::vector<double> idler;
  double degenerate_frequency;  // half the pair sum frequency

  DcSpectrum(FrequencyGrid g, std::vector<double> s, std::vector<double> i);

  double pair_sum_frequency() const { return 2.0 * degenerate_frequency; }
  // n_i(sum - w_k) for every grid frequency w_k, linearly interpolated; zero off-grid.
  std::vector<double> idler_partner(double sum_frequency) const;
};

DcSpectrum dc_spectrum(const CouplingModel& coupling, const DispersionModel& dispersion,
                       const FrequencyGrid& grid, bool phase_matched);

// Idealised spectra: density n inside |w - center| <= width/2, or a Gaussian of given
// peak and intensity FWHM, identical for signal and idler.
DcSpectrum flat_dc_spectrum(const FrequencyGrid& grid, double n, double width);
DcSpectrum gaussian_dc_spectrum(const FrequencyGrid& grid, double peak, double fwhm);

struct Band {
  double center;  // rad/s
  double width;   // rad/s
};

// Arithmetic mean of the signal density over grid samples inside the band.
double mean_photon_density(const DcSpectrum& dc, Band band);

}  // namespace twophoton
