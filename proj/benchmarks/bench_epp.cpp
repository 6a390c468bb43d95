#include <benchmark/benchmark.h>

#include <random>

#include "epp/basis.hpp"
#include "epp/dct.hpp"
#include "epp/multigrid.hpp"
#include "epp/phantom.hpp"
#include "epp/pipeline.hpp"

namespace {

using namespace epp;

Image noise_image(Eigen::Index m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Image x(m);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.matrix().data()[i] = u(rng);
    return x;
}

void BM_Dct2(benchmark::State& state) {
    const Image x = noise_image(state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(dct2(x));
}
BENCHMARK(BM_Dct2)->Arg(64)->Arg(256)->Arg(512);

void BM_ApplyBlur(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    const BlurOperator blur = blur_from_psf(make_gaussian_psf(5.0, 21), m);
    const Image x = noise_image(m, 2);
    for (auto _ : state) benchmark::DoNotOptimize(apply_blur(blur, x));
}
BENCHMARK(BM_ApplyBlur)->Arg(64)->Arg(256);

void BM_SvdBasis(benchmark::State& state) {
    const BlurOperator blur = blur_from_psf(make_out_of_focus_psf(3.0, 7), state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_svd_basis(blur));
}
BENCHMARK(BM_SvdBasis)->Arg(64)->Arg(256);

void BM_VCycle(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-6.0, 0.0);
    Eigen::VectorXd d2(gradient_length(m));
    for (auto& v : d2) v = std::pow(10.0, u(rng));
    const MgHierarchy h = mg_setup(WeightedDiffusion(m, d2));
    const Image rhs = noise_image(m, 4);
    for (auto _ : state) benchmark::DoNotOptimize(mg_vcycle(h, rhs));
}
BENCHMARK(BM_VCycle)->Arg(64)->Arg(256);

void BM_MgSetup(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    const WeightedDiffusion w = WeightedDiffusion::uniform(m);
    for (auto _ : state) benchmark::DoNotOptimize(mg_setup(w));
}
BENCHMARK(BM_MgSetup)->Arg(64)->Arg(256);

void BM_EppSolve(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    const BlurOperator blur = blur_from_psf(make_gaussian_psf(2.0, 9), m);
    const SpectralBasis basis = build_dct_basis(blur);
    const Image b = apply_blur(blur, shapes_phantom(m)) + 0.01 * noise_image(m, 5);
    EppOptions opts;
    for (auto _ : state) benchmark::DoNotOptimize(epp_solve(blur, basis, b, opts));
}
BENCHMARK(BM_EppSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
