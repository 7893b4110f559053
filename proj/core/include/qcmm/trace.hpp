#ifndef QCMM_TRACE_HPP
#define QCMM_TRACE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qcmm
{

/// Sampled polarizations of every labelled cell.
struct trace
{
    std::vector<double> times_ps;
    std::map<std::string, std::vector<double>> series;
    /// Clock zone of each labelled cell; digitize needs it to pick the sampling instant.
    std::map<std::string, int> zones;
    /// Labels that belong to input cells (sampled at cycle end rather than end-of-hold).
    std::map<std::string, bool> is_input;

    [[nodiscard]] std::size_t samples() const noexcept
    {
        return times_ps.size();
    }
    /// True iff all series match times_ps in length and times strictly increase.
    [[nodiscard]] bool well_formed() const noexcept;

    friend bool operator==(const trace&, const trace&) = default;
};

enum class logic : std::uint8_t
{
    zero,
    one,
    x
};

[[nodiscard]] constexpr char to_char(logic v) noexcept
{
    return v == logic::zero ? '0' : v == logic::one ? '1' : 'X';
}

[[nodiscard]] constexpr logic complement(logic v) noexcept
{
    return v == logic::zero ? logic::one : v == logic::one ? logic::zero : logic::x;
}

/// Per-cycle bit abstraction of a trace.
struct digital_trace
{
    std::size_t cycles{0};
    std::map<std::string, std::vector<logic>> bits;

    [[nodiscard]] logic at(const std::string& label, std::size_t cycle) const
    {
        return bits.at(label).at(cycle);
    }

    friend bool operator==(const digital_trace&, const digital_trace&) = default;
};

/// Per-cycle input stimulus. Every sequence has exactly `cycles` entries.
struct waveform_program
{
    std::size_t cycles{0};
    std::map<std::string, std::vector<std::uint8_t>> inputs;

    /// Bit driven on `label` during `cycle`; unlisted labels and cycles read as 0.
    [[nodiscard]] std::uint8_t bit(const std::string& label, std::size_t cycle) const noexcept;
    /// Sets a sequence, growing `cycles` and zero-padding all other sequences as needed.
    void set(const std::string& label, std::vector<std::uint8_t> seq);
    /// Pads every sequence with zeros up to `n` cycles (no-op if already longer).
    void pad_to(std::size_t n);

    friend bool operator==(const waveform_program&, const waveform_program&) = default;
};

}  // namespace qcmm

#endif  // QCMM_TRACE_HPP
