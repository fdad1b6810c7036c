// Thin wrapper around FFTW for 3-d complex-to-complex transforms on N^3 grids.
// Plans are cached per thread and per N; planner calls are serialized because
// the FFTW planner is not thread-safe.  FFTW_ESTIMATE keeps plan selection
// (and therefore floating-point evaluation order) identical across runs.
#pragma once

#include <complex>
#include <cstddef>

namespace nsf {

// In-place DFT of a contiguous N*N*N complex block, row-major, last index
// fastest.  sign = -1 applies e^{-i k.x} (FFTW_FORWARD), sign = +1 the
// unnormalized inverse.  No scaling is applied here.
void dft3(std::complex<double>* data, int n, int sign);

// Releases this thread's cached plans (mainly for leak-checker friendliness).
void dft3_cleanup_thread();

} // namespace nsf
