#ifndef QCMM_CMM_CIRCUITS_HPP
#define QCMM_CMM_CIRCUITS_HPP

#include "qcmm/cmm_oracle.hpp"
#include "qcmm/layout.hpp"
#include "qcmm/trace.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcmm
{

/// Largest neuron count build_array accepts.
inline constexpr std::size_t max_array_cols = 16;
/// Largest inter_neuron_delay (clock quarters) the neuron pitch can carry.
inline constexpr int max_inter_neuron_delay = 16;

struct neuron_array_spec
{
    std::size_t rows{1};
    std::size_t cols{1};
    bool accumulate{false};
    /// Clock quarters the shared x wire spends between neighbouring neurons.
    int inter_neuron_delay{4};

    /// Throws std::invalid_argument for rows or cols of 0, a negative delay or one above the cap.
    void check() const;
};

/// A labelled cell read once per presentation, `offset` cycles after the presentation starts.
/// It reports the memory weight (row, col): row indexes the stimulus, col the response.
struct sample_slot
{
    std::string label;
    std::size_t row{0};
    std::size_t col{0};
    std::size_t offset{0};

    friend bool operator==(const sample_slot&, const sample_slot&) = default;
};

/**
 * Timing contract of a generated circuit. A presentation starting at cycle p drives each input
 * at p + launch_offset[label]; its results are authoritative at p + slot.offset. Presentations
 * may start every `window` cycles.
 */
struct schedule_plan
{
    /// Input driven by each stimulus bit and each response bit.
    std::vector<std::string> stimulus_inputs;
    std::vector<std::string> response_inputs;
    std::map<std::string, std::size_t> launch_offset;
    /// Recall output of each neuron (several slots may share one label on a shared output line).
    std::vector<sample_slot> outputs;
    /// Memory probe of each neuron, read after the presentation's write.
    std::vector<sample_slot> memories;
    /// Probe on the shared wire where it enters each neuron.
    std::vector<sample_slot> arrivals;
    std::size_t window{1};
    /// Cycles from a training presentation until every memory cell reflects it.
    std::size_t train_cycles{0};
    /// Cycles from a recall presentation until every output has been read.
    std::size_t recall_cycles{0};

    [[nodiscard]] std::size_t rows() const noexcept
    {
        return stimulus_inputs.size();
    }
    [[nodiscard]] std::size_t cols() const noexcept
    {
        return response_inputs.size();
    }

    friend bool operator==(const schedule_plan&, const schedule_plan&) = default;
};

/// One window of a session: training when `response` is set, recall (response inputs 0) otherwise.
struct presentation
{
    bit_vector stimulus;
    std::optional<bit_vector> response;
};

/// A bit the circuit must show at `cycle`.
struct expected_bit
{
    std::string label;
    std::size_t cycle{0};
    logic value{logic::x};

    friend bool operator==(const expected_bit&, const expected_bit&) = default;
};

struct circuit
{
    layout lyt;
    schedule_plan plan;
};

class circuit_error : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Single neuron with inputs x_in, y_in, output z_out and memory probe M1. Each presentation
 * writes M <- x ? y : M (or M <- M | (x & y) when `accumulate`) and outputs z = M & x, reading M
 * as it was before the presentation. Without accumulation a recall (x=1, y=0) clears M.
 */
[[nodiscard]] circuit build_neuron(bool accumulate = false);

/**
 * Two neurons sharing y_in (on the upper layer), with inputs x1_in, x2_in and one OR-merged
 * output line z_out on which each neuron's bit occupies its own cycle.
 */
[[nodiscard]] circuit build_vertical_pair(bool accumulate = false);

/// Two neurons sharing x_in, with inputs y1_in, y2_in and outputs z1_out, z2_out.
[[nodiscard]] circuit build_horizontal_pair(bool accumulate = false);

/**
 * 1×cols array on one shared x_in wire (layer 0) with inter_neuron_delay quarters between
 * neurons; y{j}_in arrive on layer 2. Outputs z{j}_out, probes M{j}. Throws circuit_error for
 * rows != 1 or cols above max_array_cols.
 */
[[nodiscard]] circuit build_array(const neuron_array_spec& spec);

/// Timing of build_array(spec) without building the layout.
[[nodiscard]] schedule_plan plan_array(const neuron_array_spec& spec);

/**
 * Recall probes used after training: each distinct stimulus in first-seen order, or a single
 * all-ones probe when `pairs` is empty.
 */
[[nodiscard]] std::vector<bit_vector> recall_probes(const std::vector<std::pair<bit_vector, bit_vector>>& pairs);

/// Each pair as a training presentation, followed by recall_probes(pairs).
[[nodiscard]] std::vector<presentation> training_session(const std::vector<std::pair<bit_vector, bit_vector>>& pairs);

/**
 * Program driving `session` with presentation i starting at cycle i·window, long enough for
 * the last presentation's slots. Throws dimension_error if a presentation does not match the
 * plan's widths.
 */
[[nodiscard]] waveform_program program_for(const schedule_plan& plan, const std::vector<presentation>& session);

/**
 * Program that presents each pair in its own window, then each recall probe (with y = 0).
 * Throws dimension_error if a pair does not match the spec's widths.
 */
[[nodiscard]] waveform_program plan_training(const neuron_array_spec& spec,
                                             const std::vector<std::pair<bit_vector, bit_vector>>& pairs);

/**
 * Bits the circuit must show in the authoritative cycles of `session`. Memory slots follow the
 * weight matrix after each presentation, output slots show weight ∧ stimulus bit with the
 * weights as they were before it. With `accumulate` the weights are the oracle's; otherwise
 * each presentation with stimulus bit 1 overwrites its row with the response (0 on recall).
 */
[[nodiscard]] std::vector<expected_bit> expectation(const schedule_plan& plan,
                                                    const std::vector<presentation>& session, bool accumulate);

/// Bits of the slots for the presentation starting at `start`; cycles past the trace read X.
[[nodiscard]] std::vector<logic> read_slots(const std::vector<sample_slot>& slots, const digital_trace& dt,
                                            std::size_t start);

}  // namespace qcmm

#endif  // QCMM_CMM_CIRCUITS_HPP
