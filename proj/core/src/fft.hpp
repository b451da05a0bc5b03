#pragma once

#include <complex>
#include <span>

namespace torus3::detail {

// Real transforms of arbitrary length M, normalised so that
// coeffs[n] = (1/M) sum_j grid[j] e^{-2 pi i n j / M}.

/// grid.size() == M; coeffs.size() == M/2 + 1.
void forward_real(std::span<const double> grid, std::span<std::complex<double>> coeffs);

/// Evaluates sum_{|n| <= K} c_n e^{inx} on an M-point grid, where `coeffs`
/// holds c_0..c_K.  Modes with n >= M/2 are dropped.
void inverse_real(std::span<const std::complex<double>> coeffs, std::span<double> grid);

}  // namespace torus3::detail
