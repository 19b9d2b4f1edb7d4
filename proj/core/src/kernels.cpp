#include "twophoton/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twophoton/tabulated.hpp"

namespace twophoton {

namespace {

constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
constexpr double kReducedPlanck = 1.054571817e-34;        // J s

// Half-power point of sinc^2: sin(x)/x = 1/sqrt(2).
double sinc_half_power_point() {
  double lo = 1.0, hi = 2.0;
  const double target = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::sin(mid) / mid > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

void sample_response(InteractionKernel& kernel) {
  const auto& grid = kernel.final_grid;
  kernel.g.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    kernel.g[k] = kernel.response(grid.frequency(k) - kernel.final_center);
}

double numeric_power(const ComplexVector& g, double spacing) {
  Accumulator acc;
  for (const auto& v : g) acc.add(std::norm(v));
  return acc.value() * spacing;
}

// Band where |f| reaches half its maximum; f_avg is the complex mean of f with the
// accumulated filter phase removed.
void update_band(InteractionKernel& kernel) {
  double peak = 0.0;
  for (const auto& v : kernel.f) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) {
    kernel.f_avg = 0.0;
    kernel.overlap_bandwidth = 0.0;
    return;
  }
  Complex sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < kernel.f.size(); ++k)
    if (std::abs(kernel.f[k]) >= 0.5 * peak) {
      sum += kernel.f[k] * std::polar(1.0, -kernel.filter_phase[k]);
      ++count;
    }
  kernel.f_avg = sum / static_cast<double>(count);
  kernel.overlap_bandwidth = static_cast<double>(count) * kernel.pair_grid.spacing();
}

void check_filter(const PhaseFilter& filter) {
  for (std::size_t k = 0; k < filter.phase.size(); ++k) {
    if (!std::isfinite(filter.phase[k])) throw std::invalid_argument("filter phase must be finite");
    const double t = filter.transmission[k];
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("filter transmission must lie in [0, 1]");
  }
}

// Value at fractional position, holding edge values outside the grid.
double clamped(const std::vector<double>& values, double position) {
  const double last = static_cast<double>(values.size() - 1);
  return interpolate(values, std::clamp(position, 0.0, last));
}

}  // namespace

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Sfg:
      return "sfg";
    case KernelKind::Tpa:
      return "tpa";
    case KernelKind::TpaNonresonant:
      return "tpa_nonresonant";
    case KernelKind::Coincidence:
      return "coincidence";
  }
  return "unknown";
}

PhaseFilter::PhaseFilter(FrequencyGrid g)
    : grid(g), phase(g.size(), 0.0), transmission(g.size(), 1.0) {}

PhaseFilter::PhaseFilter(FrequencyGrid g, std::vector<double> p, std::vector<double> t)
    : grid(g), phase(std::move(p)), transmission(std::move(t)) {
  if (phase.size() != grid.size() || transmission.size() != grid.size())
    throw std::invalid_argument("filter arrays do not match the grid");
  check_filter(*this);
}

PhaseFilter constant_transmission(const FrequencyGrid& grid, double amplitude) {
  return PhaseFilter(grid, std::vector<double>(grid.size(), 0.0),
                     std::vector<double>(grid.size(), amplitude));
}

PhaseFilter load_phase_filter(const FrequencyGrid& grid,
                              const std::optional<std::filesystem::path>& phase_table,
                              const std::optional<std::filesystem::path>& transmission_table) {
  std::vector<double> phase(grid.size(), 0.0);
  std::vector<double> transmission(grid.size(), 1.0);
  auto sample = [&](const Tabulated& table, std::vector<double>& out) {
    const double lo = table.x().front();
    const double hi = table.x().back();
    for (std::size_t k = 0; k < grid.size(); ++k)
      out[k] = table(std::clamp(grid.frequency(k), lo, hi));
  };
  if (phase_table) sample(load_two_column_csv(*phase_table), phase);
  if (transmission_table) sample(load_two_column_csv(*transmission_table), transmission);
  return PhaseFilter(grid, std::move(phase), std::move(transmission));
}

InteractionKernel::InteractionKernel(KernelKind k, double center, FrequencyGrid final_grid_,
                                     FrequencyGrid pair_grid_)
    : kind(k),
      final_center(center),
      final_grid(final_grid_),
      pair_grid(pair_grid_),
      f(pair_grid_.size()),
      filter_phase(pair_grid_.size(), 0.0),
      filter_transmission(pair_grid_.size(), 1.0) {}

double mismatch_slope_for_bandwidth(double gamma, double length) {
  if (!(gamma > 0.0) || !(length > 0.0))
    throw std::invalid_argument("bandwidth and length must be positive");
  static const double x = sinc_half_power_point();
  // sinc^2(a xi L / 2) falls to one half at xi = 2x / (a L); FWHM is twice that.
  return 4.0 * x / (gamma * length);
}

InteractionKernel sfg_kernel(const DispersionModel& final_state, const DispersionModel& pair,
                             const CouplingModel& coupling, double final_center,
                             const FrequencyGrid& final_grid, const FrequencyGrid& pair_grid) {
  if (!(final_state.length > 0.0) || !(pair.length > 0.0))
    throw std::invalid_argument("up-conversion dispersion data missing (crystal length)");
  if (std::abs(final_state.length - pair.length) > 1e-12 * final_state.length)
    throw std::invalid_argument("final-state and pair mismatch use different crystal lengths");
  const double L = final_state.length;
  InteractionKernel kernel(KernelKind::Sfg, final_center, final_grid, pair_grid);
  const DispersionModel fs = final_state;
  kernel.response = [fs, final_center, L](double xi) {
    const double half = 0.5 * fs.mismatch(final_center + xi) * L;
    return std::polar(sinc(half), -half);
  };
  sample_response(kernel);

  std::vector<double> power(final_grid.size());
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(kernel.g[k]);
  const double width = full_width_half_maximum(final_grid.offsets(), power);
  kernel.bandwidth = width > 0.0 ? width : final_grid.span();
  kernel.g_power = numeric_power(kernel.g, final_grid.spacing());

  for (std::size_t k = 0; k < pair_grid.size(); ++k) {
    const double w = pair_grid.frequency(k);
    const double half = 0.5 * pair.mismatch(w) * L;
    kernel.f[k] = std::polar(sinc(half), -half) * coupling.beta_at(w);
  }
  update_band(kernel);
  kernel.prefactors["length_squared"] = L * L;
  return kernel;
}

InteractionKernel tpa_kernel(double linewidth, double transition,
                             const std::vector<IntermediateLevel>& levels,
                             const FrequencyGrid& final_grid, const FrequencyGrid& pair_grid) {
  if (!(linewidth > 0.0)) throw std::invalid_argument("final-state linewidth must be positive");
  if (!(transition > 0.0)) throw std::invalid_argument("transition frequency must be positive");
  for (const auto& level : levels)
    if (!(level.width > 0.0))
      throw std::invalid_argument("intermediate level width must be positive");

  InteractionKernel kernel(levels.empty() ? KernelKind::TpaNonresonant : KernelKind::Tpa,
                           transition, final_grid, pair_grid);
  kernel.bandwidth = linewidth;
  kernel.response = [linewidth](double xi) { return linewidth / Complex(xi, linewidth); };
  sample_response(kernel);
  kernel.g_power = kPi * linewidth;

  for (std::size_t k = 0; k < pair_grid.size(); ++k) {
    const double w = pair_grid.frequency(k);
    const double root = w < transition ? std::sqrt(w * (transition - w)) : 0.0;
    if (levels.empty()) {
      kernel.f[k] = root;
    } else {
      Complex sum = 0.0;
      for (const auto& level : levels)
        sum += level.coupling * root / Complex(level.frequency - w, -level.width);
      kernel.f[k] = sum;
    }
  }
  update_band(kernel);
  // g = 1/(xi + i gamma) physically; the stored g is gamma times that.
  kernel.prefactors["final_state_scale"] = 1.0 / (linewidth * linewidth);
  kernel.prefactors["kappa_tpa"] = 1.0;
  return kernel;
}

double tpa_coupling_constant(double dipole_sum, double beam_area, double mean_frequency,
                             double transition, double intermediate) {
  if (!(beam_area > 0.0)) throw std::invalid_argument("beam area must be positive");
  const double bracket = dipole_sum / (kSpeedOfLight * kVacuumPermittivity * beam_area * kReducedPlanck);
  const double detuning = intermediate - mean_frequency;
  if (detuning == 0.0) throw std::invalid_argument("intermediate level is resonant with <w>");
  return bracket * bracket * mean_frequency * (transition - mean_frequency) /
         (detuning * detuning) / (32.0 * kPi * kPi * kPi);
}

InteractionKernel coincidence_kernel(double width, double final_center,
                                     const FrequencyGrid& final_grid,
                                     const FrequencyGrid& pair_grid) {
  if (!(width > 0.0)) throw std::invalid_argument("coincidence bandwidth must be positive");
  if (width >= final_center)
    throw std::invalid_argument("coincidence bandwidth must be below the final-state frequency");
  InteractionKernel kernel(KernelKind::Coincidence, final_center, final_grid, pair_grid);
  kernel.bandwidth = 2.0 * width;
  kernel.response = [width](double xi) { return Complex(std::abs(xi) < width ? 1.0 : 0.0); };
  sample_response(kernel);
  kernel.g_power = 2.0 * width;
  const double half_center = 0.5 * final_center;
  for (std::size_t k = 0; k < pair_grid.size(); ++k)
    kernel.f[k] = std::abs(pair_grid.frequency(k) - half_center) < 0.5 * width ? 1.0 : 0.0;
  update_band(kernel);
  return kernel;
}

InteractionKernel apply_filter(const InteractionKernel& kernel, const PhaseFilter& signal,
                               const PhaseFilter& idler) {
  if (!(signal.grid == kernel.pair_grid) || !(idler.grid == kernel.pair_grid))
    throw std::invalid_argument("filter grid does not match the kernel pair grid");
  check_filter(signal);
  check_filter(idler);
  InteractionKernel out = kernel;
  const auto& grid = kernel.pair_grid;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double mirror = grid.position(kernel.final_center - grid.frequency(k));
    const double theta = signal.phase[k] + clamped(idler.phase, mirror);
    const double amplitude = signal.transmission[k] * clamped(idler.transmission, mirror);
    out.f[k] *= amplitude * std::polar(1.0, theta);
    out.filter_phase[k] += theta;
    out.filter_transmission[k] *= amplitude;
  }
  update_band(out);
  return out;
}

}  // namespace twophoton
