#pragma once

#include <cstdint>

namespace spscan {

// Linear state-space recurrence applied independently per channel.
//
// x and y are T x P row-major. For channel p with state h in R^N:
//   h_t = a ⊙ h_{t-1} + b * x[t][p]     (h_{-1} = 0)
//   y[t][p] = sum_k c[k] * h_t[k]
// a_diag entries must lie in (-1, 1); the caller squashes raw parameters.
// The output reduction over k always accumulates in double.
template <typename Scalar>
void scan_channels_serial(const Scalar* x, Scalar* y, int64_t T, int64_t P,
                          const Scalar* a_diag, const Scalar* b_in, const Scalar* c_out,
                          int64_t N);

// OpenMP over channels. Each channel is computed by exactly one thread with
// the same instruction sequence as the serial kernel, so results are
// bit-identical to scan_channels_serial for any thread count.
template <typename Scalar>
void scan_channels_parallel(const Scalar* x, Scalar* y, int64_t T, int64_t P,
                            const Scalar* a_diag, const Scalar* b_in, const Scalar* c_out,
                            int64_t N);

}  // namespace spscan
