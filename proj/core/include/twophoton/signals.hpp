#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twophoton/crystal.hpp"
#include "twophoton/grid.hpp"
#include "twophoton/kernels.hpp"
#include "twophoton/pump.hpp"

namespace twophoton {

enum class Regime { General, NarrowPump, BroadPump, Coincidence };

const char* to_string(Regime regime);

// Closed forms need gamma and delta_p separated by at least this factor.
inline constexpr double kRegimeMargin = 5.0;
// Gate time must exceed the pair coherence time 1/Delta by this factor.
inline constexpr double kGateMargin = 10.0;
// Largest grid the general incoherent path will allocate for.
inline constexpr std::size_t kMaxGeneralGrid = std::size_t{1} << 18;

struct SignalTrace {
  std::vector<double> axis;
  std::vector<double> coherent;
  std::vector<double> incoherent;
  Regime regime = Regime::General;
  std::map<std::string, double> prefactors;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> warnings;
};

struct EffectivePulse {
  std::vector<double> delays;  // s
  std::vector<double> values;  // P_e, in [0, 1]
  double p0 = 0.0;             // |sum amplitude dw|^2
};

// theta_s(w) + theta_i(sum - w) on the grid; the idler phase is interpolated at the
// mirrored frequency with edge values held.
std::vector<double> phase_sum(const FrequencyGrid& grid, std::span<const double> signal_phase,
                              std::span<const double> idler_phase, double sum_frequency);

// sqrt((1 + n_s(w)) n_i(sum - w)) exp(i phase(w)) exp(-i dk(w) L). Empty spans mean
// zero phase and no dispersion.
ComplexVector pair_amplitude(const DcSpectrum& dc, std::span<const double> phase,
                             std::span<const Complex> dispersion, double sum_frequency);

// P_e at arbitrary delays (exact direct sums).
EffectivePulse effective_pulse(const DcSpectrum& dc, std::span<const double> phase,
                               std::span<const Complex> dispersion,
                               std::span<const double> delays);
// P_e on the grid's own time samples (one FFT).
EffectivePulse effective_pulse(const DcSpectrum& dc, std::span<const double> phase,
                               std::span<const Complex> dispersion);

// Band averages entering the closed forms: the overlap of the half-maximum bands of
// |f| and n_s, the mean density there, and the mean of f with filter phases removed.
struct DcStats {
  double density = 0.0;
  double bandwidth = 0.0;
  Complex f_avg = 0.0;
};

DcStats dc_stats(const DcSpectrum& dc, const InteractionKernel& kernel);

// The pump as seen by the closed forms: one realization, or ensemble expectations.
class PumpInput {
 public:
  static PumpInput realization(PumpRealization realization);
  static PumpInput ensemble(EnsembleStatistics statistics);

  bool is_realization() const { return static_cast<bool>(realization_); }
  double mean_flux() const;
  double center() const;
  double bandwidth() const;

  // I(t')/I_p; averaged over the envelope support when t' is absent.
  double intensity_ratio(std::optional<double> time) const;
  // I(t') I(t' + tau) / I_p^2, or its support average; g2(tau) for ensembles.
  double correlation_ratio(std::optional<double> time, double tau) const;
  // int I(t' + tau) I(t') dt' / I_p^2.
  double correlation_integral(double tau) const;
  // |A_p(w)|^2 or its expectation.
  double spectral_density(double w) const;

 private:
  std::shared_ptr<const PumpRealization> realization_;
  std::shared_ptr<const EnsembleStatistics> statistics_;
};

struct ClosedFormOptions {
  bool self_mixing = false;  // a single beam drives the process: incoherent part doubles
};

// |G(t)|^2 for G the inverse transform of the stored g, relative to its value just after
// t = 0. For Lorentzian kernels this is u(t) exp(-2 gamma t).
double response_decay(const InteractionKernel& kernel, double t);

// Closed-form traces over the delay axis tau = tau_i - tau_s of `pulse`. `time` is
// t - tau_i; when absent, realization inputs are averaged over the envelope support.
SignalTrace coherent_closed(Regime regime, const PumpInput& pump, const DcStats& dc,
                            const InteractionKernel& kernel, const EffectivePulse& pulse,
                            std::optional<double> time = std::nullopt,
                            const ClosedFormOptions& options = {});
SignalTrace incoherent_closed(Regime regime, const PumpInput& pump, const DcStats& dc,
                              const InteractionKernel& kernel, const EffectivePulse& pulse,
                              std::optional<double> time = std::nullopt,
                              const ClosedFormOptions& options = {});
// Both components in one trace.
SignalTrace closed_form(Regime regime, const PumpInput& pump, const DcStats& dc,
                        const InteractionKernel& kernel, const EffectivePulse& pulse,
                        std::optional<double> time = std::nullopt,
                        const ClosedFormOptions& options = {});

struct RatioInputs {
  double overlap_bandwidth = 0.0;  // Delta
  double final_bandwidth = 0.0;    // gamma (narrow pump)
  double pump_bandwidth = 0.0;     // delta_p (broad pump)
  std::optional<double> inhomogeneous_bandwidth;  // replaces delta_p when present
  double density = 0.0;            // n
  double g2 = 1.0;                 // g2_p(tau_i - tau_s)
  double gate_time = 0.0;          // Tg (coincidence)
};

// Coherent-to-incoherent ratio from the regime formula, one value per P_e sample.
std::vector<double> signal_ratio(Regime regime, const RatioInputs& inputs,
                                 std::span<const double> effective_pulse);

// Gated coincidence rates: coherent I/I_p Delta (n^2+n) P_e, incoherent
// I I / I_p^2 2 Tg Delta^2 n^2, with the coherent gate integral taken as 1/Delta.
SignalTrace coincidence_rates(const PumpInput& pump, const DcStats& dc, double width,
                              double gate_time, const EffectivePulse& pulse,
                              std::optional<double> time = std::nullopt);

// Excitation spectra over the final grid (axis: Omega - Omega0): coherent
// |f_avg|^2 Delta^2 (n^2+n) P_e |g A_p|^2 / I_p, incoherent |f_avg|^2 Delta n^2 |g|^2
// times the intensity correlation at tau.
SignalTrace sfg_excitation_spectrum(const PumpInput& pump, const DcStats& dc,
                                    const InteractionKernel& kernel, double effective_pulse,
                                    double tau = 0.0);

struct Distribution {
  std::vector<double> nodes;    // Omega0 values
  std::vector<double> weights;  // P(Omega0) dOmega0, summing to one
};

// Uniform quadrature of a Gaussian of intensity FWHM `width` over +-6 sigma.
Distribution gaussian_distribution(double center, double width, std::size_t nodes);
Distribution discrete_distribution(std::vector<double> nodes, std::vector<double> weights);

SignalTrace inhomogeneous_average(const std::function<SignalTrace(double)>& generator,
                                  const Distribution& distribution);

// Integral forms; `times` are absolute t, evaluated at t - tau_i.
SignalTrace coherent_general(const PumpRealization& pump, const DcSpectrum& dc,
                             const InteractionKernel& kernel, std::span<const Complex> dispersion,
                             double tau_s, double tau_i, std::span<const double> times);
SignalTrace incoherent_general(const PumpRealization& pump, const DcSpectrum& dc,
                               const InteractionKernel& kernel, double tau_s, double tau_i,
                               std::span<const double> times);

}  // namespace twophoton
