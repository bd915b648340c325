#include "spscan/scan_kernel.hpp"

#include <vector>

namespace spscan {

namespace {

template <typename Scalar>
inline void scan_one_channel(const Scalar* x, Scalar* y, int64_t T, int64_t P, int64_t p,
                             const Scalar* a_diag, const Scalar* b_in, const Scalar* c_out,
                             int64_t N, Scalar* h) {
    for (int64_t k = 0; k < N; ++k) h[k] = Scalar(0);
    for (int64_t t = 0; t < T; ++t) {
        Scalar xv = x[t * P + p];
        double acc = 0.0;
        for (int64_t k = 0; k < N; ++k) {
            h[k] = a_diag[k] * h[k] + b_in[k] * xv;
            acc += static_cast<double>(c_out[k]) * static_cast<double>(h[k]);
        }
        y[t * P + p] = static_cast<Scalar>(acc);
    }
}

}  // namespace

template <typename Scalar>
void scan_channels_serial(const Scalar* x, Scalar* y, int64_t T, int64_t P,
                          const Scalar* a_diag, const Scalar* b_in, const Scalar* c_out,
                          int64_t N) {
    std::vector<Scalar> h(static_cast<size_t>(N));
    for (int64_t p = 0; p < P; ++p)
        scan_one_channel(x, y, T, P, p, a_diag, b_in, c_out, N, h.data());
}

template <typename Scalar>
void scan_channels_parallel(const Scalar* x, Scalar* y, int64_t T, int64_t P,
                            const Scalar* a_diag, const Scalar* b_in, const Scalar* c_out,
                            int64_t N) {
#pragma omp parallel
    {
        std::vector<Scalar> h(static_cast<size_t>(N));
#pragma omp for schedule(static)
        for (int64_t p = 0; p < P; ++p)
            scan_one_channel(x, y, T, P, p, a_diag, b_in, c_out, N, h.data());
    }
}

template void scan_channels_serial<float>(const float*, float*, int64_t, int64_t, const float*,
                                          const float*, const float*, int64_t);
template void scan_channels_serial<double>(const double*, double*, int64_t, int64_t, const double*,
                                           const double*, const double*, int64_t);
template void scan_channels_parallel<float>(const float*, float*, int64_t, int64_t, const float*,
                                            const float*, const float*, int64_t);
template void scan_channels_parallel<double>(const double*, double*, int64_t, int64_t,
                                             const double*, const double*, const double*, int64_t);

}  // namespace spscan
