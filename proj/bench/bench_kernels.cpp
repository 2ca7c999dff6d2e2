// Serial reference vs OpenMP kernels on the shapes the simulator actually
// runs: 31 channels, a few thousand symbols, and the 496x496 quadricovariance.

#include <benchmark/benchmark.h>

#include "icasim/numkit.hpp"
#include "icasim/rng.hpp"

using icasim::Matrix;
namespace numkit = icasim::numkit;

namespace {

Matrix random_signal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Matrix x(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const icasim::rng::Stream st = icasim::rng::substream(seed, 0xbe, i);
        for (std::size_t t = 0; t < cols; ++t) x(i, t) = st.gaussian(t);
    }
    return x;
}

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
    Matrix m(n, n);
    const icasim::rng::Stream st = icasim::rng::substream(seed, 0x5e, 0);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = st.gaussian(c++);
    return m;
}

void bm_covariance_ref(benchmark::State& state) {
    const Matrix x = random_signal(31, 10000, 1);
    for (auto _ : state) benchmark::DoNotOptimize(numkit::ref::covariance(x));
}

void bm_covariance_omp(benchmark::State& state) {
    const Matrix x = random_signal(31, 10000, 1);
    for (auto _ : state) benchmark::DoNotOptimize(numkit::covariance(x));
}

void bm_quadricov_ref(benchmark::State& state) {
    const Matrix x = random_signal(static_cast<std::size_t>(state.range(0)), 5000, 2);
    for (auto _ : state) benchmark::DoNotOptimize(numkit::ref::quadricov_gram(x));
}

void bm_quadricov_omp(benchmark::State& state) {
    const Matrix x = random_signal(static_cast<std::size_t>(state.range(0)), 5000, 2);
    for (auto _ : state) benchmark::DoNotOptimize(numkit::quadricov_gram(x));
}

void bm_sym_eig_ref(benchmark::State& state) {
    const Matrix m = random_symmetric(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(numkit::ref::sym_eig(m));
}

void bm_sym_eig_omp(benchmark::State& state) {
    const Matrix m = random_symmetric(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(numkit::sym_eig(m));
}

void bm_pair_moments_ref(benchmark::State& state) {
    const Matrix x = random_signal(2, 10000, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(numkit::ref::pair_moments4(x.row(0), x.row(1), x.cols()));
}

void bm_pair_moments_omp(benchmark::State& state) {
    const Matrix x = random_signal(2, 10000, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(numkit::pair_moments4(x.row(0), x.row(1), x.cols()));
}

}  // namespace

BENCHMARK(bm_covariance_ref);
BENCHMARK(bm_covariance_omp);
BENCHMARK(bm_quadricov_ref)->Arg(15)->Arg(31);
BENCHMARK(bm_quadricov_omp)->Arg(15)->Arg(31);
BENCHMARK(bm_sym_eig_ref)->Arg(128)->Arg(496);
BENCHMARK(bm_sym_eig_omp)->Arg(128)->Arg(496);
BENCHMARK(bm_pair_moments_ref);
BENCHMARK(bm_pair_moments_omp);

BENCHMARK_MAIN();
