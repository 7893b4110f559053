#include "qcmm/cmm_circuits.hpp"

#include "qcmm/gate_library.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <tuple>

namespace qcmm
{

void neuron_array_spec::check() const
{
    if (rows == 0 || cols == 0)
    {
        throw std::invalid_argument{"neuron array needs at least one row and one column"};
    }
    if (inter_neuron_delay < 0 || inter_neuron_delay > max_inter_neuron_delay)
    {
        throw std::invalid_argument{
            fmt::format("inter_neuron_delay {} outside 0..{}", inter_neuron_delay, max_inter_neuron_delay)};
    }
}

namespace
{

constexpr int neuron_pitch = 25;  // columns between neighbouring neurons

// Neuron frame: the builder origin sits on the ring's top-left corner with time 0 one quarter
// after the shared wire's launch zone, so every ring powers up to 0. The caller provides the x
// fan-out cell (0,-11) and the y cell (15,-14, layer 2), both at time -1.
//   z: (3,21) at time 7    M probe: (6,2) at time 5
constexpr int z_tau = 7;
constexpr int m_tau = 5;

void place_neuron(grid_builder& b, bool accumulate, const std::string& m_label, const std::string* z_label)
{
    place_memory_core(b, !accumulate);
    b.probe(6, 2, m_label);
    // y descends on layer 2 and drops through a via stack onto the data driver
    b.route(join({straight(15, -14, 15, -5, 2), {{15, -5, 1}, {15, -5, 0}}, straight(15, -5, 13, -5)}), -1, 1, true);
    // read tap lags the x copy by one period, so the output gate sees M before this write
    b.route(straight(3, 3, 3, 15), 5, 9);
    b.route(join({straight(0, -11, -6, -11), straight(-6, -11, -6, 18), straight(-6, 18, 0, 18)}), -1, 5);
    // AND(M, x) flowing south: M from the north, x from the west, fixed from the east
    gate_arms(b, 3, 18, 6, {{0, -1}, {-1, 0}, {1, 0}});
    b.fixed(6, 18, -1.0);
    b.route(straight(3, 18, 3, 21), 6, z_tau, true);
    if (z_label != nullptr)
        b.probe(3, 21, *z_label);
}

// Time offset of neuron j: its shared-wire arrival rounded up to whole periods.
int neuron_ref(std::size_t j, int delay)
{
    const int arrival = static_cast<int>(j) * delay;
    return 4 * ((arrival + 3) / 4);
}

std::size_t cycle_of(int tau)
{
    // a cell at time tau carries data launched in cycle p during cycle p + floor((tau+1)/4)
    return static_cast<std::size_t>((tau + 1) / 4);
}

struct row_labels
{
    std::string shared;
    std::vector<std::string> own;
    std::vector<std::string> outputs;
    std::vector<std::string> memories;
    std::vector<std::string> arrivals;
};

row_labels array_labels(std::size_t n)
{
    row_labels l;
    l.shared = "x_in";
    for (std::size_t j = 1; j <= n; ++j)
    {
        l.own.push_back(fmt::format("y{}_in", j));
        l.outputs.push_back(fmt::format("z{}_out", j));
        l.memories.push_back(fmt::format("M{}", j));
        l.arrivals.push_back(fmt::format("x{}_at", j));
    }
    return l;
}

schedule_plan array_plan(const neuron_array_spec& spec, const row_labels& labels)
{
    schedule_plan plan;
    plan.window                        = 1;
    plan.stimulus_inputs               = {labels.shared};
    plan.response_inputs               = labels.own;
    plan.launch_offset[labels.shared]  = 0;
    for (std::size_t j = 0; j < spec.cols; ++j)
    {
        const int ref = neuron_ref(j, spec.inter_neuron_delay);
        plan.launch_offset[labels.own[j]] = static_cast<std::size_t>(ref / 4);
        plan.outputs.push_back({labels.outputs[j], 0, j, cycle_of(ref + z_tau)});
        plan.memories.push_back({labels.memories[j], 0, j, cycle_of(ref + m_tau)});
        plan.arrivals.push_back({labels.arrivals[j], 0, j, cycle_of(ref - 1)});
    }
    plan.train_cycles  = plan.memories.back().offset + 1;
    plan.recall_cycles = plan.outputs.back().offset + 1;
    return plan;
}

circuit array_circuit(const neuron_array_spec& spec, const row_labels& labels, const std::string& name)
{
    spec.check();
    if (spec.rows != 1)
    {
        throw circuit_error{fmt::format("arrays with {} rows are not supported (rows must be 1)", spec.rows)};
    }
    if (spec.cols > max_array_cols)
    {
        throw circuit_error{fmt::format("{} columns exceed the cap of {}", spec.cols, max_array_cols)};
    }
    const int d = spec.inter_neuron_delay;
    grid_builder b{name};
    b.set_origin(0, 0, 1);
    (void)lead_in(b, {0, -24}, {0, 1}, labels.shared, -1, -1);
    b.route(straight(0, -16, 0, -15), -1, -1);
    for (std::size_t j = 0; j < spec.cols; ++j)
    {
        const int col = static_cast<int>(j) * neuron_pitch;
        const int ref = neuron_ref(j, d);
        const int tap = -1 + static_cast<int>(j) * d;
        b.set_origin(0, 0, 1);
        if (j > 0)
            b.route(straight(col - neuron_pitch, -15, col, -15), tap - d, tap);
        b.route(straight(col, -15, col, -11), tap, ref - 1);
        b.probe(col, -11, labels.arrivals[j]);

        b.set_origin(col, 0, 1 + ref);
        (void)lead_in(b, {15, -22}, {0, 1}, labels.own[j], -1, -1, 2);
        place_neuron(b, spec.accumulate, labels.memories[j], &labels.outputs[j]);
    }
    return {b.build(), array_plan(spec, labels)};
}

}  // namespace

circuit build_array(const neuron_array_spec& spec)
{
    return array_circuit(spec, array_labels(spec.cols), fmt::format("array{}", spec.cols));
}

schedule_plan plan_array(const neuron_array_spec& spec)
{
    spec.check();
    return array_plan(spec, array_labels(spec.cols));
}

circuit build_neuron(bool accumulate)
{
    auto labels       = array_labels(1);
    labels.own[0]     = "y_in";
    labels.outputs[0] = "z_out";
    return array_circuit({1, 1, accumulate, 4}, labels, "neuron");
}

circuit build_horizontal_pair(bool accumulate)
{
    return array_circuit({1, 2, accumulate, 4}, array_labels(2), "hpair");
}

// The shared y wire runs on layer 2 above the neurons. Neuron 2 sits one period further along
// it, and its output reaches the merging OR one period before neuron 1's.
circuit build_vertical_pair(bool accumulate)
{
    constexpr int d = 4;
    grid_builder b{"vpair"};
    b.set_origin(0, 0, 1);
    (void)lead_in(b, {15, -26}, {0, 1}, "y_in", -1, -1, 2);
    b.route(straight(15, -18, 15, -17, 2), -1, -1);
    schedule_plan plan;
    plan.window                = 2;
    plan.response_inputs       = {"y_in"};
    plan.launch_offset["y_in"] = 0;
    for (int j = 0; j < 2; ++j)
    {
        const int col = j * neuron_pitch;
        const int ref = neuron_ref(static_cast<std::size_t>(j), d);
        const int tap = -1 + j * d;
        const auto x_label = fmt::format("x{}_in", j + 1);
        const auto m_label = fmt::format("M{}", j + 1);
        const auto y_label = fmt::format("y{}_at", j + 1);
        b.set_origin(0, 0, 1);
        if (j > 0)
            b.route(straight(col + 15 - neuron_pitch, -17, col + 15, -17, 2), tap - d, tap);
        b.route(straight(col + 15, -17, col + 15, -14, 2), tap, ref - 1);
        b.probe(col + 15, -14, y_label, 2);

        b.set_origin(col, 0, 1 + ref);
        (void)lead_in(b, {0, -20}, {0, 1}, x_label, -1, -1);
        b.route(straight(0, -12, 0, -11), -1, -1);
        place_neuron(b, accumulate, m_label, nullptr);
        const auto row = static_cast<std::size_t>(j);
        plan.stimulus_inputs.push_back(x_label);
        plan.launch_offset[x_label] = static_cast<std::size_t>(ref / 4);
        plan.memories.push_back({m_label, row, 0, cycle_of(ref + m_tau)});
        plan.arrivals.push_back({y_label, row, 0, cycle_of(ref - 1)});
    }
    // OR merge below neuron 2: z2 from the north, z1 from the west, fixed 1 from the east
    const int z2   = neuron_ref(1, d) + z_tau;
    const int t_or = z2 + 2;
    const int mc   = neuron_pitch + 3;
    b.set_origin(0, 0, 1);
    b.route(straight(mc, 21, mc, 22), z2, z2 + 1);
    b.route(join({straight(3, 21, 3, 25), straight(3, 25, neuron_pitch, 25)}), z_tau, t_or - 1 + 4);
    gate_arms(b, mc, 25, t_or, {{0, -1}, {-1, 0}, {1, 0}});
    b.fixed(mc + 3, 25, 1.0);
    b.route(straight(mc, 25, mc, 28), t_or, t_or + 1, true);
    b.probe(mc, 28, "z_out");
    plan.outputs.push_back({"z_out", 0, 0, cycle_of(t_or + 1 + 4)});
    plan.outputs.push_back({"z_out", 1, 0, cycle_of(t_or + 1)});
    plan.train_cycles  = plan.memories.back().offset + 1;
    plan.recall_cycles = plan.outputs.front().offset + 1;
    return {b.build(), plan};
}

std::vector<bit_vector> recall_probes(const std::vector<std::pair<bit_vector, bit_vector>>& pairs)
{
    std::vector<bit_vector> probes;
    for (const auto& [stimulus, response] : pairs)
    {
        if (std::find(probes.begin(), probes.end(), stimulus) == probes.end())
            probes.push_back(stimulus);
    }
    if (probes.empty())
        probes.push_back(bit_vector{1});
    return probes;
}

std::vector<presentation> training_session(const std::vector<std::pair<bit_vector, bit_vector>>& pairs)
{
    std::vector<presentation> session;
    for (const auto& [stimulus, response] : pairs)
        session.push_back({stimulus, response});
    for (auto& probe : recall_probes(pairs))
        session.push_back({std::move(probe), std::nullopt});
    return session;
}

namespace
{

void check_widths(const schedule_plan& plan, const bit_vector& stimulus, const bit_vector* response)
{
    if (stimulus.size() != plan.rows() || (response != nullptr && response->size() != plan.cols()))
    {
        throw dimension_error{fmt::format("presentation of widths {}x{} does not match a {}x{} circuit",
                                          stimulus.size(), response != nullptr ? response->size() : plan.cols(),
                                          plan.rows(), plan.cols())};
    }
}

}  // namespace

waveform_program program_for(const schedule_plan& plan, const std::vector<presentation>& session)
{
    for (const auto& p : session)
        check_widths(plan, p.stimulus, p.response ? &*p.response : nullptr);
    std::size_t span = 0;
    for (const auto& [label, offset] : plan.launch_offset)
        span = std::max(span, offset);
    span = std::max({span, plan.train_cycles, plan.recall_cycles});
    const auto count  = std::max<std::size_t>(session.size(), 1);
    const auto cycles = (count - 1) * plan.window + span + 1;

    std::map<std::string, std::vector<std::uint8_t>> seq;
    for (const auto& [label, offset] : plan.launch_offset)
        seq[label].assign(cycles, 0);
    for (std::size_t i = 0; i < session.size(); ++i)
    {
        const auto start = i * plan.window;
        const auto& p    = session[i];
        for (std::size_t r = 0; r < plan.rows(); ++r)
        {
            const auto& label = plan.stimulus_inputs[r];
            seq[label][start + plan.launch_offset.at(label)] = p.stimulus[r];
        }
        for (std::size_t c = 0; p.response && c < plan.cols(); ++c)
        {
            const auto& label = plan.response_inputs[c];
            seq[label][start + plan.launch_offset.at(label)] = (*p.response)[c];
        }
    }
    waveform_program program;
    for (auto& [label, bits] : seq)
        program.set(label, std::move(bits));
    program.pad_to(cycles);
    return program;
}

waveform_program plan_training(const neuron_array_spec& spec,
                               const std::vector<std::pair<bit_vector, bit_vector>>& pairs)
{
    const auto plan = plan_array(spec);
    for (const auto& [stimulus, response] : pairs)
        check_widths(plan, stimulus, &response);
    return program_for(plan, training_session(pairs));
}

std::vector<expected_bit> expectation(const schedule_plan& plan, const std::vector<presentation>& session,
                                      bool accumulate)
{
    std::vector<expected_bit> out;
    cmm oracle{plan.rows(), plan.cols()};
    std::vector<std::uint8_t> last_write(plan.rows() * plan.cols(), 0);
    const auto weight = [&](std::size_t r, std::size_t c)
    { return accumulate ? oracle.weight(r, c) : last_write[r * plan.cols() + c]; };
    const auto bit = [](bool v) { return v ? logic::one : logic::zero; };

    for (std::size_t i = 0; i < session.size(); ++i)
    {
        const auto start = i * plan.window;
        const auto& p    = session[i];
        check_widths(plan, p.stimulus, p.response ? &*p.response : nullptr);
        for (const auto& s : plan.outputs)
            out.push_back({s.label, start + s.offset, bit(weight(s.row, s.col) != 0 && p.stimulus[s.row] != 0)});

        const bit_vector response = p.response.value_or(bit_vector(plan.cols(), 0));
        if (p.response)
            oracle = oracle.train(p.stimulus, response);
        for (std::size_t r = 0; r < plan.rows(); ++r)
        {
            for (std::size_t c = 0; c < plan.cols() && p.stimulus[r] != 0; ++c)
                last_write[r * plan.cols() + c] = response[c];
        }
        for (const auto& s : plan.memories)
            out.push_back({s.label, start + s.offset, bit(weight(s.row, s.col) != 0)});
    }
    std::sort(out.begin(), out.end(),
              [](const expected_bit& a, const expected_bit& b)
              { return std::tie(a.cycle, a.label) < std::tie(b.cycle, b.label); });
    return out;
}

std::vector<logic> read_slots(const std::vector<sample_slot>& slots, const digital_trace& dt, std::size_t start)
{
    std::vector<logic> out;
    out.reserve(slots.size());
    for (const auto& s : slots)
    {
        const auto cycle = start + s.offset;
        const auto it    = dt.bits.find(s.label);
        out.push_back(it == dt.bits.end() || cycle >= it->second.size() ? logic::x : it->second[cycle]);
    }
    return out;
}

}  // namespace qcmm
