#include <benchmark/benchmark.h>

#include "helmtg/lfa2d.hpp"
#include "helmtg/problem.hpp"
#include "helmtg/twogrid.hpp"

using namespace helmtg;

static void BM_TwoGridStep(benchmark::State& state) {
    ProblemSpec spec;
    spec.wavelengths = static_cast<double>(state.range(0));
    Problem pr = build_problem(spec);
    SolverConfig sc;
    TwoGridOperators ops = setup_two_grid(*pr.space, pr.coeffs, pr.tags, sc);
    ComplexVector u = ComplexVector::Zero(pr.space->ndof());
    for (auto _ : state) {
        two_grid_step(u, pr.rhs, ops, sc);
        benchmark::DoNotOptimize(u);
    }
    state.SetItemsProcessed(state.iterations() * pr.space->ndof());
}
BENCHMARK(BM_TwoGridStep)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_SubdomainSetup(benchmark::State& state) {
    ProblemSpec spec;
    spec.wavelengths = 10;
    Problem pr = build_problem(spec);
    for (auto _ : state) {
        DomainDecomposition dd = partition(*pr.mesh, *pr.space, 4);
        build_subdomain_operators(*pr.space, pr.coeffs, pr.tags, 0.2, dd);
        benchmark::DoNotOptimize(dd);
    }
}
BENCHMARK(BM_SubdomainSetup)->Unit(benchmark::kMillisecond);

static void BM_TwoGridSymbol(benchmark::State& state) {
    lfa2d::LfaConfig cfg;
    cfg.p = static_cast<int>(state.range(0));
    lfa2d::LfaOperators ops(cfg);
    double t = 0.1;
    for (auto _ : state) {
        DenseComplexMatrix M = ops.two_grid_symbol(t, 0.5 * t);
        benchmark::DoNotOptimize(M);
        t += 1e-4;
    }
}
BENCHMARK(BM_TwoGridSymbol)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);
