#include <benchmark/benchmark.h>

#include "helmtg/fespace.hpp"
#include "helmtg/qsfem.hpp"

using namespace helmtg;

static void BM_AssembleHelmholtz(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int p = static_cast<int>(state.range(1));
    StructuredMesh mesh = StructuredMesh::unit_square(n, ElementKind::Square);
    FeSpace space = FeSpace::build(mesh, p);
    CoefficientField cf = CoefficientField::constant(2.0 * M_PI * 10);
    BoundaryTags tags = tag_all(mesh, BoundaryTag::Absorbing);
    for (auto _ : state) {
        SparseComplexMatrix A = assemble_helmholtz(space, cf, tags, 0.0);
        benchmark::DoNotOptimize(A);
    }
    state.SetItemsProcessed(state.iterations() * space.ndof());
}
BENCHMARK(BM_AssembleHelmholtz)->Args({32, 2})->Args({32, 4})->Args({32, 8})->Unit(benchmark::kMillisecond);

static void BM_QsfemAssemble(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    StructuredMesh mesh = StructuredMesh::unit_square(n, ElementKind::Square);
    FeSpace space = FeSpace::build_any(mesh, 1);
    CoefficientField cf = CoefficientField::constant(2.0 * M_PI * 10);
    BoundaryTags tags = tag_all(mesh, BoundaryTag::Absorbing);
    for (auto _ : state) {
        SparseComplexMatrix A = qsfem::assemble(space, cf, tags);
        benchmark::DoNotOptimize(A);
    }
}
BENCHMARK(BM_QsfemAssemble)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SpMV(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    StructuredMesh mesh = StructuredMesh::unit_square(n, ElementKind::Square);
    FeSpace space = FeSpace::build(mesh, 4);
    CoefficientField cf = CoefficientField::constant(2.0 * M_PI * 10);
    BoundaryTags tags = tag_all(mesh, BoundaryTag::Absorbing);
    SparseComplexMatrix A = assemble_helmholtz(space, cf, tags, 0.0);
    ComplexVector x = ComplexVector::Random(space.ndof());
    for (auto _ : state) {
        ComplexVector y = spmv(A, x);
        benchmark::DoNotOptimize(y);
    }
    state.SetItemsProcessed(state.iterations() * A.nonZeros());
}
BENCHMARK(BM_SpMV)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);
