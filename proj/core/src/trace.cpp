#include "qcmm/trace.hpp"

namespace qcmm
{

bool trace::well_formed() const noexcept
{
    for (std::size_t i = 1; i < times_ps.size(); ++i)
    {
        if (!(times_ps[i] > times_ps[i - 1]))
            return false;
    }
    for (const auto& [label, s] : series)
    {
        if (s.size() != times_ps.size())
            return false;
    }
    return true;
}

std::uint8_t waveform_program::bit(const std::string& label, std::size_t cycle) const noexcept
{
    const auto it = inputs.find(label);
    if (it == inputs.end() || cycle >= it->second.size())
        return 0;
    return it->second[cycle];
}

void waveform_program::set(const std::string& label, std::vector<std::uint8_t> seq)
{
    if (seq.size() > cycles)
        cycles = seq.size();
    inputs[label] = std::move(seq);
    pad_to(cycles);
}

void waveform_program::pad_to(std::size_t n)
{
    if (n > cycles)
        cycles = n;
    for (auto& [label, s] : inputs)
        s.resize(cycles, 0);
}

}  // namespace qcmm
