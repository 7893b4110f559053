#include "qcmm/cmm_circuits.hpp"
#include "qcmm/engine.hpp"
#include "qcmm/verify.hpp"

#include <doctest.h>

#include <array>
#include <random>

using namespace qcmm;

namespace
{

constexpr std::array engines{engine_kind::digital, engine_kind::bistable};

digital_trace run(const circuit& c, const std::vector<presentation>& session, engine_kind k)
{
    engine_config cfg;
    cfg.kind = k;
    const clock_schedule s;
    return digitize(simulate(c.lyt, program_for(c.plan, session), s, cfg), s, cfg);
}

logic bit(bool v)
{
    return v ? logic::one : logic::zero;
}

std::vector<logic> bits(const bit_vector& v)
{
    std::vector<logic> out;
    for (const auto b : v)
        out.push_back(bit(b != 0));
    return out;
}

presentation train(bit_vector x, bit_vector y)
{
    return {std::move(x), std::move(y)};
}

presentation recall(bit_vector x)
{
    return {std::move(x), std::nullopt};
}

}  // namespace

TEST_CASE("neuron: train then recall")
{
    for (const bool acc : {false, true})
    {
        const auto c = build_neuron(acc);
        CHECK(validate(c.lyt).empty());
        for (const auto k : engines)
        {
            INFO("accumulate " << acc << " engine " << static_cast<int>(k));
            // (1,1) then recall: z = 1
            auto dt = run(c, {train({1}, {1}), recall({1})}, k);
            CHECK(read_slots(c.plan.outputs, dt, c.plan.window)[0] == logic::one);
            // (1,0) then recall: z = 0
            dt = run(c, {train({1}, {0}), recall({1})}, k);
            CHECK(read_slots(c.plan.outputs, dt, c.plan.window)[0] == logic::zero);
            // recall with x = 0 reads 0 whatever M holds
            dt = run(c, {train({1}, {1}), recall({0})}, k);
            CHECK(read_slots(c.plan.memories, dt, 0)[0] == logic::one);
            CHECK(read_slots(c.plan.outputs, dt, c.plan.window)[0] == logic::zero);
        }
    }
}

TEST_CASE("neuron: last write wins, or the memory accumulates")
{
    const std::vector<presentation> s{train({1}, {1}), train({1}, {0}), recall({1})};
    for (const auto k : engines)
    {
        const auto gated = build_neuron(false);
        CHECK(read_slots(gated.plan.outputs, run(gated, s, k), 2 * gated.plan.window)[0] == logic::zero);
        const auto acc = build_neuron(true);
        CHECK(read_slots(acc.plan.outputs, run(acc, s, k), 2 * acc.plan.window)[0] == logic::one);
    }
}

TEST_CASE("vertical pair: memory and shared output line")
{
    for (const bool acc : {false, true})
    {
        const auto c = build_vertical_pair(acc);
        CHECK(validate(c.lyt).empty());
        REQUIRE(c.plan.outputs.size() == 2);
        CHECK(c.plan.outputs[0].label == c.plan.outputs[1].label);
        CHECK(c.plan.outputs[0].offset != c.plan.outputs[1].offset);
        for (const auto k : engines)
        {
            INFO("accumulate " << acc << " engine " << static_cast<int>(k));
            // x1 = 1, y = 1 sets M1 only; recall x = (1,0) carries neuron 1's bit in its own cycle
            const auto w  = c.plan.window;
            auto dt       = run(c, {train({1, 0}, {1}), recall({1, 0})}, k);
            CHECK(read_slots(c.plan.memories, dt, 0) == bits({1, 0}));
            CHECK(read_slots(c.plan.outputs, dt, w) == bits({1, 0}));
            // all-zero training leaves both memories empty
            dt = run(c, {train({0, 0}, {0}), recall({0, 0})}, k);
            CHECK(read_slots(c.plan.memories, dt, 0) == bits({0, 0}));
            CHECK(read_slots(c.plan.outputs, dt, w) == bits({0, 0}));
            // both set, both recalled in their own cycles
            dt = run(c, {train({1, 1}, {1}), recall({1, 1})}, k);
            CHECK(read_slots(c.plan.outputs, dt, w) == bits({1, 1}));
        }
    }
}

TEST_CASE("horizontal pair: x with y2 sets M2 and recalls it")
{
    const auto c = build_horizontal_pair();
    CHECK(validate(c.lyt).empty());
    for (const auto k : engines)
    {
        auto dt = run(c, {train({1}, {0, 1}), recall({1})}, k);
        CHECK(read_slots(c.plan.memories, dt, 0) == bits({0, 1}));
        CHECK(read_slots(c.plan.outputs, dt, c.plan.window) == bits({0, 1}));
        dt = run(c, {train({0}, {1, 1}), recall({1})}, k);
        CHECK(read_slots(c.plan.memories, dt, 0) == bits({0, 0}));
    }
}

TEST_CASE("four-neuron array stores and recalls 1001")
{
    const neuron_array_spec spec{1, 4, false, 4};
    const auto c = build_array(spec);
    CHECK(validate(c.lyt).empty());
    CHECK(c.lyt.labels(cell_function::output).size() >= 4);
    for (const auto k : engines)
    {
        const auto dt = run(c, training_session({{{1}, {1, 0, 0, 1}}}), k);
        CHECK(read_slots(c.plan.memories, dt, 0) == bits({1, 0, 0, 1}));
        CHECK(read_slots(c.plan.outputs, dt, c.plan.window) == bits({1, 0, 0, 1}));
    }
}

TEST_CASE("a one-neuron array behaves like the single neuron")
{
    const auto a = build_array({1, 1, false, 4});
    const auto n = build_neuron(false);
    CHECK(a.lyt.size() == n.lyt.size());
    CHECK(a.plan.outputs.front().offset == n.plan.outputs.front().offset);
    CHECK(a.plan.memories.front().offset == n.plan.memories.front().offset);
    for (const int x : {0, 1})
    {
        for (const int y : {0, 1})
        {
            const std::vector<presentation> s{train({static_cast<std::uint8_t>(x)}, {static_cast<std::uint8_t>(y)}),
                                              recall({1})};
            const auto da = run(a, s, engine_kind::digital);
            const auto dn = run(n, s, engine_kind::digital);
            CHECK(read_slots(a.plan.outputs, da, 1) == read_slots(n.plan.outputs, dn, 1));
            CHECK(read_slots(a.plan.memories, da, 0) == read_slots(n.plan.memories, dn, 0));
        }
    }
}

TEST_CASE("y launch offsets match the measured x arrival cycles")
{
    // zeros prime the shared wire, then a single x pulse is timed at every neuron
    constexpr std::size_t pulse = 6;
    for (const int d : {2, 4, 8})
    {
        for (const auto k : engines)
        {
            const neuron_array_spec spec{1, 4, false, d};
            const auto c = build_array(spec);
            std::vector<presentation> s(pulse, recall({0}));
            s.push_back(recall({1}));
            s.resize(s.size() + 6, recall({0}));
            const auto dt = run(c, s, k);
            for (std::size_t j = 0; j < 4; ++j)
            {
                const auto& slot = c.plan.arrivals[j];
                const auto& seq  = dt.bits.at(slot.label);
                INFO("delay " << d << " neuron " << j << " engine " << static_cast<int>(k));
                REQUIRE(seq.size() > pulse + slot.offset + 1);
                for (std::size_t cy = pulse; cy <= pulse + slot.offset + 1; ++cy)
                    CHECK(seq[cy] == bit(cy == pulse + slot.offset));
                CHECK(c.plan.launch_offset.at(c.plan.response_inputs[j]) == slot.offset);
            }
        }
    }
}

TEST_CASE("plan_training: one pair, no pairs, wrong widths")
{
    const neuron_array_spec spec{1, 4, false, 4};
    const auto plan = plan_array(spec);
    const auto p    = plan_training(spec, {{{1}, {1, 0, 0, 1}}});
    // one training window then one recall window
    CHECK(p.cycles == plan.window + std::max(plan.train_cycles, plan.recall_cycles) + 1);
    CHECK(p.inputs.at("x_in")[0] == 1);
    CHECK(p.inputs.at("x_in")[plan.window] == 1);
    for (std::size_t j = 0; j < 4; ++j)
    {
        const auto& label = plan.response_inputs[j];
        const auto off    = plan.launch_offset.at(label);
        CHECK(p.inputs.at(label)[off] == (j == 0 || j == 3 ? 1 : 0));
        CHECK(p.inputs.at(label)[off + plan.window] == 0);
    }

    const auto c  = build_array(spec);
    const auto dt = digitize(simulate(c.lyt, plan_training(spec, {}), clock_schedule{}, engine_config{}),
                             clock_schedule{}, engine_config{});
    CHECK(read_slots(plan.outputs, dt, 0) == bits({0, 0, 0, 0}));

    CHECK_THROWS_AS((void)plan_training(spec, {{{1}, {1, 0, 1}}}), dimension_error);
    CHECK_THROWS_AS((void)plan_training(spec, {{{1, 1}, {1, 0, 0, 1}}}), dimension_error);
}

TEST_CASE("array spec limits")
{
    CHECK_THROWS_AS((void)build_array({2, 2, false, 4}), circuit_error);
    CHECK_THROWS_AS((void)build_array({1, max_array_cols + 1, false, 4}), circuit_error);
    CHECK_THROWS_AS((void)build_array({1, 0, false, 4}), std::invalid_argument);
    CHECK_THROWS_AS((void)build_array({1, 2, false, -1}), std::invalid_argument);
    CHECK_THROWS_AS((void)build_array({1, 2, false, max_inter_neuron_delay + 1}), std::invalid_argument);
}

TEST_CASE("training latency grows linearly with the neuron count")
{
    for (const int d : {4, 8, 12})
    {
        const std::array<std::size_t, 4> ns{1, 2, 4, 8};
        std::array<long, 4> cycles{};
        for (std::size_t i = 0; i < ns.size(); ++i)
            cycles[i] = static_cast<long>(plan_array({1, ns[i], false, d}).train_cycles);
        const long b = (cycles[1] - cycles[0]) / static_cast<long>(ns[1] - ns[0]);
        const long a = cycles[0] - b * static_cast<long>(ns[0]);
        CHECK(b > 0);
        for (std::size_t i = 0; i < ns.size(); ++i)
            CHECK(cycles[i] == a + b * static_cast<long>(ns[i]));
    }
}

TEST_CASE("build_array and plan_array agree")
{
    for (std::size_t n = 1; n <= 5; ++n)
        CHECK(build_array({1, n, true, 4}).plan == plan_array({1, n, true, 4}));
}

TEST_CASE("expectation of the coincidence sequence, written out by hand")
{
    const auto plan = build_neuron().plan;
    const auto mo   = plan.memories[0].offset;
    const auto zo   = plan.outputs[0].offset;
    const std::vector<presentation> s{train({1}, {1}), recall({1}), recall({1})};
    // gated memory: set, then cleared by the first read
    std::vector<expected_bit> want{{"M1", 0 + mo, logic::one},  {"z_out", 0 + zo, logic::zero},
                                   {"M1", 1 + mo, logic::zero}, {"z_out", 1 + zo, logic::one},
                                   {"M1", 2 + mo, logic::zero}, {"z_out", 2 + zo, logic::zero}};
    auto got = expectation(plan, s, false);
    const auto key = [](const expected_bit& e) { return std::tie(e.cycle, e.label); };
    std::sort(want.begin(), want.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    CHECK(got == want);
    // accumulating memory keeps its bit
    got = expectation(plan, s, true);
    for (const auto& e : got)
    {
        if (e.label == "M1")
            CHECK(e.value == logic::one);
        else
            CHECK(e.value == (e.cycle == zo ? logic::zero : logic::one));
    }
}

TEST_CASE("exhaustive single-pair equivalence with the oracle, digital engine")
{
    for (const bool acc : {false, true})
    {
        for (std::size_t n = 1; n <= 4; ++n)
        {
            const neuron_array_spec spec{1, n, acc, 4};
            const auto c = build_array(spec);
            for (std::uint8_t x = 0; x <= 1; ++x)
            {
                for (unsigned ym = 0; ym < (1U << n); ++ym)
                {
                    bit_vector y(n);
                    for (std::size_t j = 0; j < n; ++j)
                        y[j] = static_cast<std::uint8_t>((ym >> j) & 1U);
                    const auto oracle = cmm{1, n}.train({x}, y);
                    const auto want   = threshold(oracle.recall({1}), threshold_strategy::fixed(1));
                    const auto dt     = run(c, {train({x}, y), recall({1})}, engine_kind::digital);
                    INFO("n=" << n << " x=" << int{x} << " y=" << ym << " acc=" << acc);
                    CHECK(read_slots(c.plan.outputs, dt, c.plan.window) == bits(want));
                }
            }
        }
    }
}

TEST_CASE("accumulating arrays match the oracle matrix, digital engine")
{
    std::mt19937 rng{77};
    std::uniform_int_distribution<std::size_t> n_of(1, 4), k_of(1, 3);
    std::bernoulli_distribution coin{0.5};
    for (int trial = 0; trial < 30; ++trial)
    {
        const auto n = n_of(rng);
        const auto c = build_array({1, n, true, 4});
        std::vector<presentation> s;
        cmm oracle{1, n};
        for (std::size_t k = k_of(rng); k > 0; --k)
        {
            bit_vector y(n);
            for (auto& b : y)
                b = coin(rng) ? 1 : 0;
            const bit_vector x{static_cast<std::uint8_t>(coin(rng) ? 1 : 0)};
            oracle = oracle.train(x, y);
            s.push_back(train(x, y));
        }
        const auto dt   = run(c, s, engine_kind::digital);
        const auto last = (s.size() - 1) * c.plan.window;
        std::vector<logic> want;
        for (std::size_t j = 0; j < n; ++j)
            want.push_back(bit(oracle.weight(0, j) != 0));
        CHECK(read_slots(c.plan.memories, dt, last) == want);
    }
}
