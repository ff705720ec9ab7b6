// Serial reference kernels against their OpenMP versions on curl-curl operators.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "nkamg/experiment.hpp"
#include "nkamg/rng.hpp"

using namespace nkamg;

namespace {

double best_of(int reps, const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial_s, double omp_s) {
    std::printf("%-22s %12.3f %12.3f %8.2fx\n", name, serial_s * 1e3, omp_s * 1e3, serial_s / omp_s);
}

} // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    for (std::size_t n : {32, 64}) {
        const auto pl = build_curlcurl_pipeline(curlcurl_tri_dirichlet(n, n, 0.01));
        const auto& a = pl.problem.A;
        const auto& p = pl.P.P;
        const auto pt = p.transpose();
        const Vector x = random_vector(a.ncols(), 1);
        std::printf("\ntri %zux%zu, %zu DoFs, %zu nonzeros\n", n, n, a.nrows(), a.nnz());
        std::printf("%-22s %12s %12s %9s\n", "kernel", "serial ms", "openmp ms", "speedup");
        row("spmv x100", best_of(5, [&] { for (int k = 0; k < 100; ++k) serial::spmv(a, x); }),
            best_of(5, [&] { for (int k = 0; k < 100; ++k) spmv(a, x); }));
        row("multiply A*P", best_of(5, [&] { serial::multiply(a, p); }), best_of(5, [&] { multiply(a, p); }));
        row("sptriple P^T A P", best_of(5, [&] { serial::sptriple(pt, a, p); }),
            best_of(5, [&] { sptriple(pt, a, p); }));
        const int threads = omp_get_max_threads();
        omp_set_num_threads(1);
        const double ideal1 = best_of(2, [&] { ideal_interpolation(a, pl.basis); });
        omp_set_num_threads(threads);
        row("ideal interpolation", ideal1, best_of(2, [&] { ideal_interpolation(a, pl.basis); }));
    }
    return 0;
}
