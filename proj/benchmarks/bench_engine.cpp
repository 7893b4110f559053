#include "qcmm/cmm_circuits.hpp"
#include "qcmm/engine.hpp"
#include "qcmm/gate_library.hpp"

#include <benchmark/benchmark.h>

using namespace qcmm;

namespace
{

// Training plus recall of one pair on an n-neuron array.
void simulate_array(benchmark::State& state, engine_kind kind)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto c = build_array({1, n, false, 4});
    bit_vector y(n, 1);
    const auto p = program_for(c.plan, training_session({{{1}, y}}));
    engine_config cfg;
    cfg.kind    = kind;
    cfg.threads = static_cast<std::size_t>(state.range(1));
    const clock_schedule s;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(c.lyt, p, s, cfg));
    state.counters["cells"] = static_cast<double>(c.lyt.size());
}

void BM_bistable_array(benchmark::State& state)
{
    simulate_array(state, engine_kind::bistable);
}

void BM_digital_array(benchmark::State& state)
{
    simulate_array(state, engine_kind::digital);
}

void BM_majority_truth(benchmark::State& state)
{
    const auto l = make_majority();
    waveform_program p;
    p.set("a", {0, 1, 0, 1, 0, 1, 0, 1});
    p.set("b", {0, 0, 1, 1, 0, 0, 1, 1});
    p.set("c", {0, 0, 0, 0, 1, 1, 1, 1});
    const engine_config cfg;
    const clock_schedule s;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(l, p, s, cfg));
}

}  // namespace

BENCHMARK(BM_bistable_array)->Args({1, 1})->Args({4, 1})->Args({4, 4})->Args({8, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_digital_array)->Args({4, 1})->Args({16, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_majority_truth)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
