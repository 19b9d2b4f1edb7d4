#pragma once

#include <span>

#include "twophoton/grid.hpp"

namespace twophoton::detail {

// Unnormalised in-place DFT: y_k = sum_j x_j exp(sign * 2 pi i j k / n).
void dft_inplace(std::span<Complex> data, int sign);

}  // namespace twophoton::detail
