#include "qcmm/verify.hpp"

namespace qcmm
{

std::vector<truth_row> sweep_truth_table(const layout& lyt, const gate_signature& sig, const engine_config& cfg,
                                         const clock_schedule& sched, std::size_t hold)
{
    if (hold == 0)
        throw std::invalid_argument{"sweep_truth_table: hold must be positive"};
    const std::size_t n    = sig.inputs.size();
    const std::size_t rows = std::size_t{1} << n;
    waveform_program program;
    for (std::size_t i = 0; i < n; ++i)
    {
        std::vector<std::uint8_t> seq;
        for (std::size_t m = 0; m < rows; ++m)
            seq.insert(seq.end(), hold, static_cast<std::uint8_t>((m >> i) & 1U));
        // one trailing cycle so late-zone outputs of the last row are sampled inside the trace
        seq.push_back(seq.back());
        program.set(sig.inputs[i], std::move(seq));
    }
    const auto dt = digitize(simulate(lyt, program, sched, cfg), sched, cfg);

    std::vector<truth_row> table;
    for (std::size_t m = 0; m < rows; ++m)
    {
        truth_row row;
        for (std::size_t i = 0; i < n; ++i)
            row.inputs.push_back(((m >> i) & 1U) != 0);
        row.expected = sig.function(row.inputs);
        row.got      = dt.at(sig.output, m * hold + hold - 1);
        table.push_back(std::move(row));
    }
    return table;
}

comparison compare(const digital_trace& dt, const std::vector<expected_bit>& expected)
{
    comparison result;
    for (const auto& e : expected)
    {
        const auto it  = dt.bits.find(e.label);
        const auto got = it == dt.bits.end() || e.cycle >= it->second.size() ? logic::x : it->second[e.cycle];
        auto& [checked, bad] = result.signals[e.label];
        ++checked;
        if (got != e.value)
        {
            ++bad;
            result.mismatches.push_back({e.label, e.cycle, e.value, got});
        }
    }
    return result;
}

}  // namespace qcmm
