#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace fvps::detail {

/// Unnormalised complex DFT of length n, out-of-place.
/// sign = -1: out[k] = sum_j in[j] exp(-2 pi i jk/n); sign = +1 the conjugate kernel.
void dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign);

/// In-place convenience wrapper (copies through a scratch buffer).
void dft_inplace(std::span<std::complex<double>> data, int sign);

}  // namespace fvps::detail
