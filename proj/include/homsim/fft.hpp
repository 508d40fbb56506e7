#pragma once

#include "homsim/common.hpp"

namespace homsim::fft {

// In-place 2D DFTs on row-major data (ny rows of nx samples).
// forward() is unnormalized, inverse() divides by nx*ny, so the pair is
// an identity. Plans are cached per (nx, ny, direction); planning is
// serialized behind a mutex, execution is thread-safe on distinct buffers.
void forward(int nx, int ny, cplx* data);
void inverse(int nx, int ny, cplx* data);

}  // namespace homsim::fft
