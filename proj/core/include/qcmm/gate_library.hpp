#ifndef QCMM_GATE_LIBRARY_HPP
#define QCMM_GATE_LIBRARY_HPP

#include "qcmm/layout.hpp"

#include <array>
#include <initializer_list>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qcmm
{

/**
 * Grid-based layout builder. Cells are addressed by integer (col, row, layer) and converted
 * to nm by the pitch; zones are given as absolute clock times and reduced mod 4 on output,
 * so composed blocks can reason about latency with plain integer arithmetic.
 */
class grid_builder
{
  public:
    explicit grid_builder(std::string name, double pitch = default_pitch);

    /// Normal cell clocked at time `tau` (zone = tau mod 4).
    void normal(int col, int row, int tau, std::uint32_t layer = 0);
    void fixed(int col, int row, double pol, std::uint32_t layer = 0);
    void input(int col, int row, int tau, const std::string& label, std::uint32_t layer = 0);
    void output(int col, int row, int tau, const std::string& label, std::uint32_t layer = 0);
    /// Promotes an existing normal cell to an output probe.
    void probe(int col, int row, const std::string& label, std::uint32_t layer = 0);

    /**
     * Lays a wire through the grid points of `path` (excluding path.front(), which must be an
     * existing cell clocked at `tau_from`), ending at time `tau_to`. Consecutive points must be
     * 4-neighbours or a vertical step (same col/row, adjacent layer). Clock steps are spread
     * as evenly as possible, or taken as early as possible when `eager` is set (so the first new
     * cell already belongs to the next zone). Throws layout_error if the path is too short for
     * the requested latency.
     */
    void route(const std::vector<std::array<int, 3>>& path, int tau_from, int tau_to, bool eager = false);

    /// Clock time of the cell at (col,row,layer); throws if absent.
    [[nodiscard]] int tau_at(int col, int row, std::uint32_t layer = 0) const;
    [[nodiscard]] bool occupied(int col, int row, std::uint32_t layer = 0) const;

    /// Translates all subsequent coordinates by (dc, dr) and clock times by dt.
    void set_origin(int dc, int dr, int dt = 0) noexcept
    {
        origin_col_ = dc;
        origin_row_ = dr;
        origin_tau_ = dt;
    }

    [[nodiscard]] layout build() const;

  private:
    struct entry
    {
        cell_function func;
        int tau;
        std::optional<double> pol;
        std::optional<std::string> label;
    };
    using key = std::array<int, 3>;

    void put(int col, int row, std::uint32_t layer, entry e);

    std::string name_;
    double pitch_;
    std::map<key, entry> cells_;
    std::vector<key> order_;
    int origin_col_{0};
    int origin_row_{0};
    int origin_tau_{0};
};

/// Straight path helper: points from (c0,r0) to (c1,r1) inclusive along one axis.
[[nodiscard]] std::vector<std::array<int, 3>> straight(int c0, int r0, int c1, int r1, int layer = 0);
/// Concatenates paths, dropping the duplicated joint point.
[[nodiscard]] std::vector<std::array<int, 3>> join(std::vector<std::vector<std::array<int, 3>>> parts);

/// Majority centre at (c, r) clocked at `tau` with a two-cell arm towards each {dc, dr} unit step.
void gate_arms(grid_builder& b, int c, int r, int tau, std::initializer_list<std::pair<int, int>> arms);

/**
 * Forked inverter flowing along (fc, fr) with its output at (oc, orow): the line end sits three
 * cells upstream and forks into two branches ending diagonal to the output. Cells are clocked
 * at `tau`, the output at tau + 1. A `source` polarization turns the line end into a fixed cell.
 */
void inverter_into(grid_builder& b, int oc, int orow, int fc, int fr, int tau,
                   std::optional<double> source = std::nullopt);

/**
 * Input `label` at `at` plus eight cells towards `dir`, starting at `first_tau` and advancing one
 * clock time every two cells up to `last_tau`. Returns the last cell as a path head.
 */
[[nodiscard]] std::vector<std::array<int, 3>> lead_in(grid_builder& b, std::array<int, 2> at,
                                                      std::array<int, 2> dir, const std::string& label,
                                                      int first_tau, int last_tau, std::uint32_t layer = 0);

/**
 * One-period memory ring on cols 0..6, rows 0..3 with its write logic, in the builder's current
 * frame. Expects the write-enable cell at (0,-11) clocked at -1 and the data driver at (13,-5)
 * clocked at 1. A write is visible on the ring at time 5. With `gated` false the loop never forgets
 * (m <- m | (we & d)); otherwise m <- we ? d : m. Powers up to 0 when the frame's time 0 lies in
 * absolute clock zone 1.
 */
void place_memory_core(grid_builder& b, bool gated);

enum class gate_kind : std::uint8_t
{
    wire,
    inverter,
    majority,
    and_gate,
    or_gate,
    memory_loop,
    crossover
};

[[nodiscard]] std::string_view to_string(gate_kind k) noexcept;
[[nodiscard]] std::optional<gate_kind> parse_gate_kind(std::string_view s) noexcept;

enum class orientation : std::uint8_t
{
    east,
    south,
    west,
    north
};

struct gate_spec
{
    gate_kind kind{gate_kind::wire};
    std::size_t length{8};  // wires only
    int zone_start{0};
    orientation orient{orientation::east};
    std::size_t zone_span{4};  // wires only: cells per clock zone
};

/// Input labels and the Boolean function a gate layout computes, for truth-table sweeps.
struct gate_signature
{
    std::vector<std::string> inputs;
    std::string output;
    /// Output bit for an input assignment given in `inputs` order.
    bool (*function)(const std::vector<bool>&);
};

/**
 * Collinear wire of `n` cells: cell 0 is the input `in`, cell n-1 the output `out`, and the
 * clock zone advances every `zone_span` cells starting at `zone_start`.
 */
[[nodiscard]] layout make_wire(std::size_t n, int zone_start = 0, std::size_t zone_span = 4);
/// Forked-line inverter: input `a`, output `out`.
[[nodiscard]] layout make_inverter(int zone_start = 0);
/// Cross-shaped majority gate with inputs `a`, `b`, `c` and output `out`.
[[nodiscard]] layout make_majority(int zone_start = 0);
/// Majority gate with one input fixed to -1: inputs `a`, `b`, output `out`.
[[nodiscard]] layout make_and(int zone_start = 0);
/// Majority gate with one input fixed to +1: inputs `a`, `b`, output `out`.
[[nodiscard]] layout make_or(int zone_start = 0);
/**
 * One-period clocked loop with a gated write port: while `we` is 1 the loop takes `d`,
 * otherwise it recirculates. `q` taps the stored bit; `m` probes the loop itself.
 * Reads before the first write show the power-up state, which depends on `zone_start`.
 */
[[nodiscard]] layout make_memory_loop(int zone_start = 0);
/// Two independent paths `a`→`a_out` (main layer) and `b`→`b_out` (bridged over on layer 2).
[[nodiscard]] layout make_crossover(int zone_start = 0);

/// Rotates a layout by a multiple of 90° about the origin (east = identity).
[[nodiscard]] layout rotate(const layout& lyt, orientation o);

[[nodiscard]] layout make_gate(const gate_spec& spec);
/// Truth-table signature for the combinational gates; nullopt for wire-like or sequential ones.
[[nodiscard]] std::optional<gate_signature> signature_of(gate_kind k);

}  // namespace qcmm

#endif  // QCMM_GATE_LIBRARY_HPP
