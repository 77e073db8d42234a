#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace gkdv::fft {

using cplx = std::complex<double>;

/// Unnormalized forward DFT: out[m] = sum_j in[j] exp(-2 pi i m j / n).
/// `in` and `out` may alias. Thread-safe.
void forward(std::span<const cplx> in, std::span<cplx> out);

/// Unnormalized inverse DFT: out[j] = sum_m in[m] exp(+2 pi i m j / n).
void inverse(std::span<const cplx> in, std::span<cplx> out);

}  // namespace gkdv::fft
