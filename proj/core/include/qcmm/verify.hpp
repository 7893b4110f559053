#ifndef QCMM_VERIFY_HPP
#define QCMM_VERIFY_HPP

#include "qcmm/cmm_circuits.hpp"
#include "qcmm/engine.hpp"
#include "qcmm/gate_library.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace qcmm
{

struct truth_row
{
    std::vector<bool> inputs;
    bool expected{false};
    logic got{logic::x};

    [[nodiscard]] bool pass() const noexcept
    {
        return got == (expected ? logic::one : logic::zero);
    }
};

/**
 * Drives every input assignment of `sig` for `hold` cycles each (in binary counting order,
 * inputs[0] least significant) and reads the output in the last cycle of each hold.
 */
[[nodiscard]] std::vector<truth_row> sweep_truth_table(const layout& lyt, const gate_signature& sig,
                                                       const engine_config& cfg, const clock_schedule& sched = {},
                                                       std::size_t hold = 3);

struct mismatch
{
    std::string label;
    std::size_t cycle{0};
    logic expected{logic::x};
    logic got{logic::x};
};

struct comparison
{
    /// Per label: authoritative cycles checked and how many of them mismatched.
    std::map<std::string, std::pair<std::size_t, std::size_t>> signals;
    std::vector<mismatch> mismatches;

    [[nodiscard]] bool ok() const noexcept
    {
        return mismatches.empty();
    }
};

/// Checks `dt` at every expected bit; labels or cycles missing from the trace read X.
[[nodiscard]] comparison compare(const digital_trace& dt, const std::vector<expected_bit>& expected);

}  // namespace qcmm

#endif  // QCMM_VERIFY_HPP
