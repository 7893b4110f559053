#ifndef QCMM_ENGINE_HPP
#define QCMM_ENGINE_HPP

#include "qcmm/layout.hpp"
#include "qcmm/trace.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcmm
{

/**
 * Four-phase trapezoidal clock. Each zone spends one quarter period in each of
 * switch (barrier falling), hold (low), release (rising) and relax (high); zone k lags
 * zone 0 by k quarter periods.
 */
struct clock_schedule
{
    double period_ps{100.0};
    std::size_t samples_per_cycle{32};
    double gamma_low{3.8e-23};   // J
    double gamma_high{9.8e-22};  // J

    [[nodiscard]] double dt_ps() const noexcept
    {
        return period_ps / static_cast<double>(samples_per_cycle);
    }
    /// Throws std::invalid_argument if the schedule is unusable.
    void check() const;
};

enum class clock_phase : std::uint8_t
{
    switching,
    hold,
    release,
    relax
};

/// Phase of `zone` at time `t_ps` (t >= 0).
[[nodiscard]] clock_phase phase_at(int zone, double t_ps, const clock_schedule& sched);

/// Tunneling barrier of `zone` at time `t_ps`; throws std::invalid_argument for t < 0 or a bad zone.
[[nodiscard]] double clock_gamma(int zone, double t_ps, const clock_schedule& sched);

enum class engine_kind : std::uint8_t
{
    digital,
    bistable
};

struct engine_config
{
    engine_kind kind{engine_kind::bistable};
    double radius_of_effect{65.0};  // nm
    double convergence_tol{1e-3};
    std::size_t max_iterations{100};
    double relative_permittivity{12.9};
    /// Distance between neighbouring dots of one cell, nm.
    double dot_spacing{9.0};
    /// Vertical distance between adjacent layers, nm.
    double layer_separation{11.5};
    double digitize_threshold{0.5};
    /// Fraction of each Jacobi step applied (1 = undamped); damping suppresses the period-2
    /// orbit simultaneous updates admit on bipartite couplings.
    double update_weight{0.5};
    /// Worker threads for one Jacobi sweep; results are bit-identical for any value.
    std::size_t threads{1};

    /// Throws std::invalid_argument on violated invariants (`pitch` is the layout pitch).
    void check(double pitch) const;
};

class engine_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/**
 * Kink energy between two cells: electrostatic energy of the anti-aligned configuration
 * minus that of the aligned one, summed over the 4×4 dot pairs with ±e/2 net dot charges.
 * Positive means the pair prefers equal polarization. Throws engine_error for coincident
 * cells or cells farther apart than the radius of effect.
 */
[[nodiscard]] double kink_energy(const cell& a, const cell& b, const engine_config& cfg);

/// Same quantity for a raw center offset (nm); no radius check.
[[nodiscard]] double kink_energy_offset(double dx, double dy, double dz, const engine_config& cfg);

/// Sparse symmetric coupling table of a layout.
class coupling_table
{
  public:
    struct neighbor
    {
        std::size_t index;
        double energy;
    };

    coupling_table(const layout& lyt, const engine_config& cfg);

    [[nodiscard]] const std::vector<neighbor>& neighbors(std::size_t i) const noexcept
    {
        return adjacency_[i];
    }
    [[nodiscard]] std::size_t size() const noexcept
    {
        return adjacency_.size();
    }
    /// Largest |E| in the table (0 for an uncoupled layout).
    [[nodiscard]] double max_energy() const noexcept
    {
        return max_energy_;
    }

  private:
    std::vector<std::vector<neighbor>> adjacency_;
    double max_energy_{0.0};
};

struct relax_result
{
    std::vector<double> polarization;
    std::size_t iterations{0};
    bool converged{false};
};

/**
 * Jacobi fixed point of P_i = x/sqrt(1+x²), x = Σ_j E_ij P_j / 2γ_i, with fixed cells and
 * driven input cells pinned to ±1. `gamma` holds the barrier of each clock zone. Every
 * input label must appear in `drivers`.
 */
[[nodiscard]] relax_result relax(const layout& lyt, const std::map<std::string, std::uint8_t>& drivers,
                                 const std::array<double, 4>& gamma, const engine_config& cfg,
                                 const std::vector<double>* seed = nullptr);

struct simulation_stats
{
    std::size_t steps{0};
    std::size_t nonconverged_steps{0};
    std::size_t total_iterations{0};
};

/**
 * Runs `program` on `lyt` for program.cycles clock periods and records every labelled cell.
 * An input in zone z is pinned to cycle c's bit from quarter 4c + z on (cycle 0's bit before
 * that), so it never changes while its zone holds. Inputs absent from the program are driven with 0. Throws engine_error if the program names
 * a label that is not an input of the layout.
 */
[[nodiscard]] trace simulate(const layout& lyt, const waveform_program& program, const clock_schedule& sched,
                             const engine_config& cfg, simulation_stats* stats = nullptr);

/**
 * Samples each label once per cycle at the final instant of its zone's hold quarter
 * (input cells: final instant of the cycle). Samples past the end of the trace read X.
 */
[[nodiscard]] digital_trace digitize(const trace& tr, const clock_schedule& sched, const engine_config& cfg);

/// Sample index read by digitize for a cell in `zone` during `cycle`.
[[nodiscard]] std::size_t hold_sample_index(int zone, std::size_t cycle, const clock_schedule& sched) noexcept;

}  // namespace qcmm

#endif  // QCMM_ENGINE_HPP
