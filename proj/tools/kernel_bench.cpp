#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <vector>

#include "spscan/common.hpp"
#include "spscan/perf.hpp"
#include "spscan/scan_kernel.hpp"

using namespace spscan;

namespace {

struct Case {
    int64_t T, P, N;
};

std::vector<double> random_vec(std::mt19937_64& rng, size_t n, double scale) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * (2.0 * draw_unit(rng) - 1.0);
    return v;
}

}  // namespace

int main() {
    std::mt19937_64 rng = fork_rng(7, "kernel-bench");
    const std::vector<Case> cases = {{4096, 32, 16}, {16384, 32, 16}, {65536, 32, 16}};
    const int repeats = 5;

    std::cout << "scan kernel: serial vs OpenMP (" << repeats << " repeats, median)\n";
    std::cout << "T\tP\tN\tserial_ms\tparallel_ms\tspeedup\tmax_abs_diff\n";
    for (const Case& c : cases) {
        std::vector<double> x = random_vec(rng, static_cast<size_t>(c.T * c.P), 1.0);
        std::vector<double> a = random_vec(rng, static_cast<size_t>(c.N), 0.9);
        std::vector<double> b = random_vec(rng, static_cast<size_t>(c.N), 1.0);
        std::vector<double> cv = random_vec(rng, static_cast<size_t>(c.N), 1.0);
        std::vector<double> y_serial(x.size()), y_parallel(x.size());

        ThroughputStats serial = measure_throughput(
            [&] {
                scan_channels_serial(x.data(), y_serial.data(), c.T, c.P, a.data(), b.data(),
                                     cv.data(), c.N);
            },
            1, repeats);
        ThroughputStats parallel = measure_throughput(
            [&] {
                scan_channels_parallel(x.data(), y_parallel.data(), c.T, c.P, a.data(),
                                       b.data(), cv.data(), c.N);
            },
            1, repeats);

        double max_diff = 0.0;
        for (size_t i = 0; i < x.size(); ++i)
            max_diff = std::max(max_diff, std::abs(y_serial[i] - y_parallel[i]));

        double speedup = parallel.median_ms > 0 ? serial.median_ms / parallel.median_ms : 0.0;
        std::cout << c.T << "\t" << c.P << "\t" << c.N << "\t" << serial.median_ms << "\t"
                  << parallel.median_ms << "\t" << speedup << "\t" << max_diff << "\n";
        if (max_diff != 0.0) {
            std::cerr << "error: kernels disagree\n";
            return 1;
        }
    }
    return 0;
}
