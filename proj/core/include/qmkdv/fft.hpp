#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace qmkdv::fft {

using cplx = std::complex<double>;

// In-place unnormalized transforms. forward uses e^{-2 pi i jm/n}, backward
// uses e^{+2 pi i jm/n}. Plans are cached per (shape, direction); the cache is
// guarded so these can be called concurrently from several threads.
void forward(std::span<cplx> data);
void backward(std::span<cplx> data);

// Row-major 3D transforms over an n0 x n1 x n2 block.
void forward3(std::span<cplx> data, std::size_t n0, std::size_t n1, std::size_t n2);
void backward3(std::span<cplx> data, std::size_t n0, std::size_t n1, std::size_t n2);

}  // namespace qmkdv::fft
