#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twophoton/crystal.hpp"
#include "twophoton/grid.hpp"

namespace twophoton {

enum class KernelKind { Sfg, Tpa, TpaNonresonant, Coincidence };

const char* to_string(KernelKind kind);

// Per-beam spectral filter: phase theta(w) and amplitude transmission Theta(w) in [0, 1].
struct PhaseFilter {
  FrequencyGrid grid;
  std::vector<double> phase;
  std::vector<double> transmission;

  explicit PhaseFilter(FrequencyGrid g);  // identity
  PhaseFilter(FrequencyGrid g, std::vector<double> phase, std::vector<double> transmission);
};

PhaseFilter constant_transmission(const FrequencyGrid& grid, double amplitude);

// Samples two-column CSV tables (w in rad/s, theta in rad) and (w in rad/s, Theta) on the
// grid. Either may be absent. Outside a table's range the edge value is held.
PhaseFilter load_phase_filter(const FrequencyGrid& grid,
                              const std::optional<std::filesystem::path>& phase_table,
                              const std::optional<std::filesystem::path>& transmission_table);

// Final-state response g(xi), xi = Omega - Omega0, normalised to max |g| = 1, and pair
// amplitude f(w, Omega0) on the signal grid. Physical scale factors that were divided
// out of g live in `prefactors`.
struct InteractionKernel {
  KernelKind kind = KernelKind::Sfg;
  double final_center = 0.0;  // Omega0
  double bandwidth = 0.0;     // gamma

  FrequencyGrid final_grid;
  ComplexVector g;  // g(Omega_k - Omega0) at final_grid.frequency(k)
  std::function<Complex(double)> response;  // g at an arbitrary xi
  double g_power = 0.0;                     // int |g|^2 dxi

  FrequencyGrid pair_grid;
  ComplexVector f;
  Complex f_avg = 0.0;             // mean of f over its half-maximum band, filter phase removed
  double overlap_bandwidth = 0.0;  // measure of that band

  std::vector<double> filter_phase;         // theta_s(w) + theta_i(Omega0 - w)
  std::vector<double> filter_transmission;  // Theta_s(w) Theta_i(Omega0 - w)

  std::map<std::string, double> prefactors;

  InteractionKernel(KernelKind k, double center, FrequencyGrid final_grid_, FrequencyGrid pair_grid_);
};

// Linear mismatch slope a (dk = a * xi) whose sinc^2 response has FWHM gamma for length L.
double mismatch_slope_for_bandwidth(double gamma, double length);

// Up-conversion kernel. `final_state` gives dk as a function of the sum frequency (its
// xi dependence at the mean input frequency); `pair` gives dk as a function of the
// signal frequency at Omega = Omega0. Both must share one crystal length.
InteractionKernel sfg_kernel(const DispersionModel& final_state, const DispersionModel& pair,
                             const CouplingModel& coupling, double final_center,
                             const FrequencyGrid& final_grid, const FrequencyGrid& pair_grid);

struct IntermediateLevel {
  double frequency;  // w_ng, rad/s
  double width;      // gamma_n, rad/s
  double coupling;   // mu_fn * mu_ng, arbitrary units
};

InteractionKernel tpa_kernel(double linewidth, double transition,
                             const std::vector<IntermediateLevel>& levels,
                             const FrequencyGrid& final_grid, const FrequencyGrid& pair_grid);

// Absolute TPA scale from dipole data (SI): [sum mu mu / (c eps0 S hbar)]^2
// * <w>(w_fg - <w>) / (w_ng - <w>)^2 / (32 pi^3).
double tpa_coupling_constant(double dipole_sum, double beam_area, double mean_frequency,
                             double transition, double intermediate);

InteractionKernel coincidence_kernel(double width, double final_center,
                                     const FrequencyGrid& final_grid,
                                     const FrequencyGrid& pair_grid);

InteractionKernel apply_filter(const InteractionKernel& kernel, const PhaseFilter& signal,
                               const PhaseFilter& idler);

}  // namespace twophoton
