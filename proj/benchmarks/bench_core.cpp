// Microbenchmarks for the hot paths: basis construction, ladder application,
// dressing assembly, propagator factorization and the Schur resolvent.

#include <benchmark/benchmark.h>

#include "gsb/fock_space.hpp"
#include "gsb/ladder_ops.hpp"
#include "gsb/linalg.hpp"
#include "gsb/resolvent_engine.hpp"

namespace {

using namespace gsb;

const FieldModel& model() {
    static const FieldModel m =
        FieldModel::uniform(Dispersion::klein_gordon(1.0), 25.0, 16);
    return m;
}

const FockBasis& basis() {
    static const FockBasis b = FockBasis::build(16, 3);
    return b;
}

void BM_BuildBasis(benchmark::State& state) {
    for (auto _ : state) {
        FockBasis b = FockBasis::build(static_cast<int>(state.range(0)), 3);
        benchmark::DoNotOptimize(b.dimension());
    }
}
BENCHMARK(BM_BuildBasis)->Arg(8)->Arg(16)->Arg(24);

void BM_BuildLadder(benchmark::State& state) {
    const FormFactor f = FormFactor::wqed(model());
    for (auto _ : state) {
        LadderPair pair = build_ladder(f, basis(), model());
        benchmark::DoNotOptimize(pair.annihilate.entries.nonZeros());
    }
}
BENCHMARK(BM_BuildLadder);

void BM_LadderApply(benchmark::State& state) {
    const LadderPair pair = build_ladder(FormFactor::wqed(model()), basis(), model());
    std::mt19937_64 rng(3);
    const Vector v = random_vector(rng, basis().dimension());
    for (auto _ : state) {
        Vector w = pair.annihilate.entries * v;
        benchmark::DoNotOptimize(w.sum());
    }
}
BENCHMARK(BM_LadderApply);

void BM_Dressing(benchmark::State& state) {
    const FormFactor f = FormFactor::flat(model());
    for (auto _ : state) {
        DressingOperator s = dressing(f, Complex(0.5, 0.5),
                                      DressingKind::Renormalized, basis(), model());
        benchmark::DoNotOptimize(s.matrix.nonZeros());
    }
}
BENCHMARK(BM_Dressing);

void BM_Propagator(benchmark::State& state) {
    const FormFactor f = FormFactor::wqed(model());
    for (auto _ : state) {
        PropagatorHandle g = propagator(f, Complex(1.0, 1.0), 1.0, 0.5,
                                        DressingKind::Plain, basis(), model());
        benchmark::DoNotOptimize(g.matrix().nonZeros());
    }
}
BENCHMARK(BM_Propagator);

void BM_RwaResolve(benchmark::State& state) {
    const RwaResolvent r(FormFactor::wqed(model()), 1.0, 0.5, DressingKind::Plain,
                         basis(), model());
    std::mt19937_64 rng(5);
    const Vector v = random_vector(rng, 2 * basis().dimension());
    r.apply_flat(Complex(1.0, 1.0), v);  // warm the factorization cache
    for (auto _ : state) {
        Vector w = r.apply_flat(Complex(1.0, 1.0), v);
        benchmark::DoNotOptimize(w.sum());
    }
}
BENCHMARK(BM_RwaResolve);

void BM_WeightedNormRefined(benchmark::State& state) {
    const FormFactor f = FormFactor::flat(model());
    for (auto _ : state) {
        FormFactor fresh = f;  // defeat the norm cache
        benchmark::DoNotOptimize(
            weighted_norm_squared(model(), fresh, 2.0, NormMode::Refined));
    }
}
BENCHMARK(BM_WeightedNormRefined);

} // namespace

BENCHMARK_MAIN();
