#include <benchmark/benchmark.h>

#include <random>

#include "fixtures.hpp"
#include "mcomp/spec_dsl.hpp"
#include "mcomp/trace.hpp"
#include "mcomp/weaver.hpp"
#include "random_composition.hpp"

using namespace mcomp;
using namespace mcomp::testing;

static void BM_ScenarioExecute(benchmark::State& state)
{
    const Case c = library_case();
    for (auto _ : state) {
        benchmark::DoNotOptimize(c.run());
    }
}
BENCHMARK(BM_ScenarioExecute);

static void BM_ScenarioTrace(benchmark::State& state)
{
    const ExecutionResult r = library_case().run();
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_trace(r));
    }
}
BENCHMARK(BM_ScenarioTrace);

static void BM_ScenarioWovenExecute(benchmark::State& state)
{
    const Case c = library_case();
    const CompositionSpec woven = weave_traceability(c.spec).spec;
    for (auto _ : state) {
        benchmark::DoNotOptimize(execute(woven, c.left, c.right, c.mms));
    }
}
BENCHMARK(BM_ScenarioWovenExecute);

static void BM_Weave(benchmark::State& state)
{
    const CompositionSpec spec = load_spec_fixture("scenario.mcomp");
    for (auto _ : state) {
        benchmark::DoNotOptimize(weave_traceability(spec));
    }
}
BENCHMARK(BM_Weave);

static void BM_ParseSpec(benchmark::State& state)
{
    const std::string text = read_fixture("scenario.mcomp");
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_spec(text));
    }
}
BENCHMARK(BM_ParseSpec);

// Generation is excluded from timing; cases that fail to resolve still count.
static void BM_RandomCompositions(benchmark::State& state)
{
    std::mt19937 rng(7);
    for (auto _ : state) {
        state.PauseTiming();
        const RandomCase rc = random_case(rng);
        state.ResumeTiming();
        try {
            benchmark::DoNotOptimize(generate_trace(execute(rc.spec, rc.left, rc.right, rc.mms)));
        } catch (const Error&) {
        }
    }
}
BENCHMARK(BM_RandomCompositions);
BENCHMARK_MAIN();
