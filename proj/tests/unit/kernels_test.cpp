#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "twophoton/kernels.hpp"

using namespace twophoton;

namespace {

const double kFinal = kTwoPi * 580e12;
const FrequencyGrid kFinalGrid(kFinal, kTwoPi / 12e-9, 2048);
const FrequencyGrid kPairGrid = make_grid(0.5 * kFinal, 6e14, 1024);

InteractionKernel up_conversion(double gamma) {
  DispersionModel final_state;
  final_state.length = 1e-3;
  final_state.reference = kFinal;
  final_state.linear = mismatch_slope_for_bandwidth(gamma, 1e-3);
  DispersionModel pair;
  pair.length = 1e-3;
  return sfg_kernel(final_state, pair, CouplingModel{1.0, 1.0, {}}, kFinal, kFinalGrid, kPairGrid);
}

double max_abs(const ComplexVector& values) {
  double peak = 0.0;
  for (const auto& v : values) peak = std::max(peak, std::abs(v));
  return peak;
}

}  // namespace

TEST(UpConversion, ResponseWidthIsTheRequestedBandwidth) {
  const double gamma = kTwoPi * 20e9;
  const auto kernel = up_conversion(gamma);
  std::vector<double> power;
  for (const auto& v : kernel.g) power.push_back(std::norm(v));
  EXPECT_NEAR(full_width_half_maximum(kFinalGrid.offsets(), power), gamma, 0.01 * gamma);
  EXPECT_NEAR(max_abs(kernel.g), 1.0, 1e-3);
}

TEST(UpConversion, SincSquaredHalfPoint) {
  // sinc^2(x) = 1/2 at x = 1.3915573; the slope puts that point at xi = gamma / 2.
  const double gamma = 3.0, length = 2e-3;
  const double slope = mismatch_slope_for_bandwidth(gamma, length);
  EXPECT_NEAR(slope * 0.5 * gamma * length / 2.0, 1.3915573, 1e-6);
}

TEST(UpConversion, PowerMatchesGridSum) {
  const auto kernel = up_conversion(kTwoPi * 20e9);
  double sum = 0.0;
  for (const auto& v : kernel.g) sum += std::norm(v) * kFinalGrid.spacing();
  EXPECT_NEAR(kernel.g_power, sum, 1e-9 * sum);
}

TEST(Absorption, LorentzianPowerIsPiGamma) {
  const double gamma = kTwoPi * 1e9;
  const auto kernel = tpa_kernel(gamma, kFinal, {}, kFinalGrid, kPairGrid);
  EXPECT_DOUBLE_EQ(kernel.g_power, kPi * gamma);
  double sum = 0.0;
  for (const auto& v : kernel.g) sum += std::norm(v) * kFinalGrid.spacing();
  // The grid spans about 170 linewidths; the truncated tails hold under 1%.
  EXPECT_NEAR(sum / kernel.g_power, 1.0, 0.01);
  EXPECT_NEAR(max_abs(kernel.g), 1.0, 1e-9);
}

TEST(Absorption, ResponseDecaysAtTwiceTheLinewidth) {
  const double gamma = kTwoPi * 1e9;
  const auto kernel = tpa_kernel(gamma, kFinal, {}, kFinalGrid, kPairGrid);
  EXPECT_NEAR(std::norm(kernel.response(gamma)), 0.5, 1e-12);
}

TEST(Coincidence, BandwidthBelowFinalFrequency) {
  EXPECT_THROW(coincidence_kernel(2.0 * kFinal, kFinal, kFinalGrid, kPairGrid),
               std::invalid_argument);
  const auto kernel = coincidence_kernel(1e14, kFinal, kFinalGrid, kPairGrid);
  EXPECT_DOUBLE_EQ(kernel.bandwidth, 2e14);
  EXPECT_DOUBLE_EQ(kernel.g_power, 2e14);
}

TEST(Filters, ConstantTransmissionScalesBothBeams) {
  const auto kernel = up_conversion(kTwoPi * 20e9);
  const auto half = constant_transmission(kPairGrid, 0.5);
  const auto filtered = apply_filter(kernel, half, half);
  for (std::size_t k = 0; k < kPairGrid.size(); ++k)
    EXPECT_NEAR(std::abs(filtered.f[k]), 0.25 * std::abs(kernel.f[k]), 1e-15);
}

TEST(Filters, GridMismatchIsRejected) {
  const auto kernel = up_conversion(kTwoPi * 20e9);
  const PhaseFilter other(make_grid(0.5 * kFinal, 6e14, 512));
  EXPECT_THROW(apply_filter(kernel, other, other), std::invalid_argument);
}

TEST(Filters, PhaseTableHoldsEdgeValues) {
  const auto path = std::filesystem::temp_directory_path() / "twophoton-phase-test.csv";
  {
    std::ofstream out(path);
    out.precision(17);
    const double lo = kPairGrid.frequency(100), hi = kPairGrid.frequency(900);
    out << "# w, theta\nfrequency,phase\n" << lo << ",1.0\n" << hi << ",3.0\n";
  }
  const auto filter = load_phase_filter(kPairGrid, path, std::nullopt);
  std::filesystem::remove(path);
  EXPECT_DOUBLE_EQ(filter.phase[0], 1.0);
  EXPECT_DOUBLE_EQ(filter.phase[1023], 3.0);
  EXPECT_NEAR(filter.phase[500], 2.0, 1e-9);
  EXPECT_DOUBLE_EQ(filter.transmission[500], 1.0);
}

TEST(Filters, IdlerPhaseAppearsOnTheMirroredBin) {
  const auto kernel = up_conversion(kTwoPi * 20e9);
  std::vector<double> phase(kPairGrid.size(), 0.0);
  phase[600] = 0.9;
  const PhaseFilter idler(kPairGrid, phase, std::vector<double>(kPairGrid.size(), 1.0));
  const auto filtered = apply_filter(kernel, PhaseFilter(kPairGrid), idler);
  // Bin 600 mirrors onto bin 424 about half the final frequency.
  EXPECT_NEAR(filtered.filter_phase[kPairGrid.size() - 600], 0.9, 1e-12);
}
