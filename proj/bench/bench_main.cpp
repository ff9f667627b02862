// Timing harness for the parallel paths vs their serial references.  The
// numeric columns double as a determinism check: the parallel and serial
// results must agree bitwise (max |diff| printed, expected 0).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "spreadout/kernels.hpp"
#include "spreadout/returns.hpp"
#include "spreadout/simulate.hpp"

using namespace spreadout;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void row(const char* name, double serial_s, double parallel_s, double maxdiff) {
    std::printf("%-28s %10.3f s %10.3f s  x%5.2f   max|diff| %.3g\n", name, serial_s,
                parallel_s, serial_s / parallel_s, maxdiff);
}

}  // namespace

int main(int argc, char** argv) {
    const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
    std::printf("workers: %d (SPREADOUT_WORKERS overrides)\n\n", resolve_workers(0));

    {
        Kernel k = make_uniform(3, 2);
        const int N = 12 * scale;
        double t0 = now_s();
        ReturnSeries a = return_series_dense(k, N, std::size_t{6} << 30, false);
        double t1 = now_s();
        ReturnSeries b = return_series_dense(k, N, std::size_t{6} << 30, true);
        double t2 = now_s();
        double md = 0.0;
        for (int n = 0; n <= N; ++n) md = std::fmax(md, std::fabs(a.r[n] - b.r[n]));
        row("dense convolution d=3", t1 - t0, t2 - t1, md);
    }
    {
        Kernel k = make_uniform(2, 12);
        const int n = 24 * scale;
        double t0 = now_s();
        double a = fourier_quadrature_return(k, n, false);
        double t1 = now_s();
        double b = fourier_quadrature_return(k, n, true);
        double t2 = now_s();
        row("fourier quadrature d=2", t1 - t0, t2 - t1, std::fabs(a - b));
    }
    {
        Kernel k = make_uniform(2, 2);
        SimConfig cfg;
        cfg.trials = 400'000 * scale;
        cfg.seed = 99;
        double t0 = now_s();
        SimEstimate a = mc_return_serial(k, 6, cfg);
        double t1 = now_s();
        SimEstimate b = mc_return(k, 6, cfg);
        double t2 = now_s();
        row("mc return walks d=2", t1 - t0, t2 - t1, std::fabs(a.value - b.value));
    }
    {
        Kernel k = make_uniform(5, 1);
        SimConfig cfg;
        cfg.trials = 20'000 * scale;
        cfg.horizon = 100;
        cfg.ignore_collisions = true;
        cfg.p = 1.0;
        SimConfig serial = cfg;
        serial.workers = 1;
        double t0 = now_s();
        SimEstimate a = op_survival(k, cfg.p, serial);
        double t1 = now_s();
        SimEstimate b = op_survival(k, cfg.p, cfg);
        double t2 = now_s();
        row("ghost survival d=5", t1 - t0, t2 - t1, std::fabs(a.value - b.value));
    }
    return 0;
}
