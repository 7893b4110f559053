#include "qcmm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <unordered_map>

namespace qcmm
{

namespace
{

constexpr double elementary_charge = 1.602176634e-19;  // C
constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

struct dot
{
    double x, y;
    double sign;  // sign of the net dot charge for P = +1
};

// P = +1 puts the electrons on the upper-right/lower-left diagonal.
std::array<dot, 4> dots_of(double half)
{
    return {{{half, half, -1.0}, {-half, half, 1.0}, {-half, -half, -1.0}, {half, -half, 1.0}}};
}

int zone_of(int zone)
{
    if (zone < 0 || zone > 3)
        throw std::invalid_argument("clock zone must be in 0..3");
    return zone;
}

}  // namespace

void clock_schedule::check() const
{
    if (!(period_ps > 0.0) || !std::isfinite(period_ps))
        throw std::invalid_argument("clock period must be positive");
    if (samples_per_cycle < 4 || samples_per_cycle % 4 != 0)
        throw std::invalid_argument("samples_per_cycle must be a positive multiple of 4");
    if (!(gamma_low > 0.0) || !(gamma_low < gamma_high))
        throw std::invalid_argument("clock requires 0 < gamma_low < gamma_high");
}

clock_phase phase_at(int zone, double t_ps, const clock_schedule& sched)
{
    if (t_ps < 0.0)
        throw std::invalid_argument("clock time must be non-negative");
    const double quarter = sched.period_ps / 4.0;
    double local         = std::fmod(t_ps - zone_of(zone) * quarter, sched.period_ps);
    if (local < 0.0)
        local += sched.period_ps;
    const auto q = std::min(3, static_cast<int>(local / quarter));
    return static_cast<clock_phase>(q);
}

double clock_gamma(int zone, double t_ps, const clock_schedule& sched)
{
    if (t_ps < 0.0)
        throw std::invalid_argument("clock time must be non-negative");
    const double quarter = sched.period_ps / 4.0;
    double local         = std::fmod(t_ps - zone_of(zone) * quarter, sched.period_ps);
    if (local < 0.0)
        local += sched.period_ps;
    const auto q          = std::min(3, static_cast<int>(local / quarter));
    const double fraction = (local - q * quarter) / quarter;
    const double span     = sched.gamma_high - sched.gamma_low;
    switch (static_cast<clock_phase>(q))
    {
        case clock_phase::switching: return sched.gamma_high - span * fraction;
        case clock_phase::hold: return sched.gamma_low;
        case clock_phase::release: return sched.gamma_low + span * fraction;
        case clock_phase::relax: return sched.gamma_high;
    }
    return sched.gamma_high;
}

void engine_config::check(double pitch) const
{
    if (!(convergence_tol > 0.0))
        throw std::invalid_argument("convergence_tol must be positive");
    if (!(radius_of_effect >= pitch))
        throw std::invalid_argument("radius_of_effect must be at least one pitch");
    if (!(digitize_threshold > 0.0 && digitize_threshold < 1.0))
        throw std::invalid_argument("digitize_threshold must lie in (0, 1)");
    if (!(relative_permittivity > 0.0) || !(dot_spacing > 0.0) || !(layer_separation > 0.0))
        throw std::invalid_argument("permittivity, dot spacing and layer separation must be positive");
    if (max_iterations == 0)
        throw std::invalid_argument("max_iterations must be positive");
    if (!(update_weight > 0.0 && update_weight <= 1.0))
        throw std::invalid_argument("update_weight must lie in (0, 1]");
}

double kink_energy_offset(double dx, double dy, double dz, const engine_config& cfg)
{
    const double q     = elementary_charge / 2.0;
    const double scale = q * q / (4.0 * std::numbers::pi * vacuum_permittivity * cfg.relative_permittivity);
    const auto dots    = dots_of(cfg.dot_spacing / 2.0);
    // the energy is even in each offset component; folding makes mirrored pairs bit-identical
    dx = std::abs(dx);
    dy = std::abs(dy);
    dz = std::abs(dz);

    // aligned minus anti-aligned differ only in the sign of the second cell's charges
    double aligned = 0.0;
    for (const auto& a : dots)
    {
        for (const auto& b : dots)
        {
            const double d = std::sqrt((dx + b.x - a.x) * (dx + b.x - a.x) + (dy + b.y - a.y) * (dy + b.y - a.y) +
                                       dz * dz) *
                             1e-9;
            aligned += a.sign * b.sign / d;
        }
    }
    return -2.0 * scale * aligned;
}

double kink_energy(const cell& a, const cell& b, const engine_config& cfg)
{
    const double dx = b.pos.x - a.pos.x;
    const double dy = b.pos.y - a.pos.y;
    const double dz = (static_cast<double>(b.pos.layer) - static_cast<double>(a.pos.layer)) * cfg.layer_separation;
    const double r  = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (r < 1e-9)
        throw engine_error("kink_energy: coincident cells '" + a.id + "' and '" + b.id + "'");
    if (r > cfg.radius_of_effect)
        throw engine_error("kink_energy: '" + a.id + "' and '" + b.id + "' lie beyond the radius of effect");
    return kink_energy_offset(dx, dy, dz, cfg);
}

coupling_table::coupling_table(const layout& lyt, const engine_config& cfg) : adjacency_(lyt.cells.size())
{
    // Bin cells on an xy grid of radius-sized buckets; layers share buckets.
    const double bin = cfg.radius_of_effect;
    struct key_hash
    {
        std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const noexcept
        {
            return std::hash<std::int64_t>{}(k.first * 1000003 ^ k.second);
        }
    };
    std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, key_hash> bins;
    const auto key_of = [bin](const cell& c)
    {
        return std::pair{static_cast<std::int64_t>(std::floor(c.pos.x / bin)),
                         static_cast<std::int64_t>(std::floor(c.pos.y / bin))};
    };
    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
        bins[key_of(lyt.cells[i])].push_back(i);

    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
    {
        const auto& a       = lyt.cells[i];
        const auto [kx, ky] = key_of(a);
        for (std::int64_t ox = -1; ox <= 1; ++ox)
        {
            for (std::int64_t oy = -1; oy <= 1; ++oy)
            {
                const auto it = bins.find({kx + ox, ky + oy});
                if (it == bins.end())
                    continue;
                for (const auto j : it->second)
                {
                    if (j == i)
                        continue;
                    const auto& b   = lyt.cells[j];
                    const double dx = b.pos.x - a.pos.x, dy = b.pos.y - a.pos.y;
                    const double dz =
                        (static_cast<double>(b.pos.layer) - static_cast<double>(a.pos.layer)) * cfg.layer_separation;
                    if (std::sqrt(dx * dx + dy * dy + dz * dz) > cfg.radius_of_effect)
                        continue;
                    const double e = kink_energy(a, b, cfg);
                    adjacency_[i].push_back({j, e});
                    max_energy_ = std::max(max_energy_, std::abs(e));
                }
            }
        }
        std::sort(adjacency_[i].begin(), adjacency_[i].end(),
                  [](const neighbor& l, const neighbor& r) { return l.index < r.index; });
    }
}

namespace
{

// Pinned polarization of every cell for one cycle; NaN marks a free cell.
std::vector<double> pins_for(const layout& lyt, const std::map<std::string, std::uint8_t>& drivers)
{
    std::vector<double> pins(lyt.cells.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
    {
        const auto& c = lyt.cells[i];
        if (c.func == cell_function::fixed)
            pins[i] = c.fixed_pol.value_or(0.0);
        else if (c.func == cell_function::input)
        {
            const auto it = drivers.find(c.label.value_or(""));
            if (it == drivers.end())
                throw engine_error("relax: input '" + c.label.value_or(c.id) + "' is not driven");
            pins[i] = it->second ? 1.0 : -1.0;
        }
    }
    return pins;
}

class jacobi_solver
{
  public:
    jacobi_solver(const layout& lyt, const coupling_table& table, const engine_config& cfg) :
            lyt_{lyt},
            table_{table},
            cfg_{cfg},
            next_(lyt.cells.size(), 0.0)
    {}

    // Relaxes `state` in place. Pinned entries of `pins` are copied into `state` first.
    relax_result run(std::vector<double>& state, const std::vector<double>& pins, const std::array<double, 4>& gamma)
    {
        const auto n = state.size();
        free_.clear();
        for (std::size_t i = 0; i < n; ++i)
        {
            if (std::isnan(pins[i]))
                free_.push_back(i);
            else
                state[i] = pins[i];
        }
        next_ = state;

        relax_result res;
        for (std::size_t it = 1; it <= cfg_.max_iterations; ++it)
        {
            const double delta = sweep(state, gamma);
            std::swap(state, next_);
            res.iterations = it;
            if (delta < cfg_.convergence_tol)
            {
                res.converged = true;
                break;
            }
        }
        // keep next_ consistent with state for the following call
        next_ = state;
        return res;
    }

  private:
    double update_range(const std::vector<double>& state, const std::array<double, 4>& gamma, std::size_t lo,
                        std::size_t hi)
    {
        double delta = 0.0;
        for (std::size_t k = lo; k < hi; ++k)
        {
            const auto i = free_[k];
            double field = 0.0;
            for (const auto& nb : table_.neighbors(i))
                field += nb.energy * state[nb.index];
            const double x = field / (2.0 * gamma[static_cast<std::size_t>(lyt_.cells[i].zone)]);
            const double p = x / std::sqrt(1.0 + x * x);
            delta          = std::max(delta, std::abs(p - state[i]));
            next_[i]       = state[i] + cfg_.update_weight * (p - state[i]);
        }
        return delta;
    }

    double sweep(const std::vector<double>& state, const std::array<double, 4>& gamma)
    {
        const auto workers = std::min<std::size_t>(cfg_.threads, std::max<std::size_t>(1, free_.size() / 64));
        if (workers <= 1)
            return update_range(state, gamma, 0, free_.size());

        std::vector<double> deltas(workers, 0.0);
        {
            std::vector<std::jthread> pool;
            const auto chunk = (free_.size() + workers - 1) / workers;
            for (std::size_t w = 0; w < workers; ++w)
            {
                const auto lo = w * chunk, hi = std::min(free_.size(), lo + chunk);
                pool.emplace_back([&, w, lo, hi] { deltas[w] = update_range(state, gamma, lo, hi); });
            }
        }
        return *std::max_element(deltas.begin(), deltas.end());
    }

    const layout& lyt_;
    const coupling_table& table_;
    const engine_config& cfg_;
    std::vector<double> next_;
    std::vector<std::size_t> free_;
};

// An input in zone z takes cycle c's bit when its zone starts switching, at quarter 4c + z,
// so a driver never changes while its own zone holds.
std::map<std::string, std::uint8_t> drivers_for_quarter(const layout& lyt, const waveform_program& program,
                                                        std::size_t quarter)
{
    std::map<std::string, std::uint8_t> drivers;
    for (const auto& c : lyt.cells)
    {
        if (c.func == cell_function::input && c.label)
        {
            const auto z     = static_cast<std::size_t>(c.zone);
            const auto cycle = quarter >= z ? (quarter - z) / 4 : 0;
            drivers[*c.label] = program.bit(*c.label, cycle);
        }
    }
    return drivers;
}

trace empty_trace(const layout& lyt)
{
    trace tr;
    for (const auto& c : lyt.cells)
    {
        if (c.label && (c.func == cell_function::input || c.func == cell_function::output))
        {
            tr.series[*c.label];
            tr.zones[*c.label]    = c.zone;
            tr.is_input[*c.label] = c.func == cell_function::input;
        }
    }
    return tr;
}

void record(trace& tr, const layout& lyt, const std::vector<double>& state, double t)
{
    tr.times_ps.push_back(t);
    for (std::size_t i = 0; i < lyt.cells.size(); ++i)
    {
        const auto& c = lyt.cells[i];
        if (c.label && (c.func == cell_function::input || c.func == cell_function::output))
            tr.series[*c.label].push_back(std::clamp(state[i], -1.0, 1.0));
    }
}

trace simulate_bistable(const layout& lyt, const waveform_program& program, const clock_schedule& sched,
                        const engine_config& cfg, simulation_stats& stats)
{
    const coupling_table table{lyt, cfg};
    jacobi_solver solver{lyt, table, cfg};
    auto tr = empty_trace(lyt);
    std::vector<double> state(lyt.cells.size(), 0.0);

    const auto steps = program.cycles * sched.samples_per_cycle;
    std::vector<double> pins;
    for (std::size_t k = 0; k < steps; ++k)
    {
        const auto per_quarter = sched.samples_per_cycle / 4;
        if (k % per_quarter == 0)
            pins = pins_for(lyt, drivers_for_quarter(lyt, program, k / per_quarter));
        const double t = static_cast<double>(k) * sched.dt_ps();
        std::array<double, 4> gamma{};
        for (int z = 0; z < 4; ++z)
            gamma[static_cast<std::size_t>(z)] = clock_gamma(z, t, sched);

        const auto res = solver.run(state, pins, gamma);
        ++stats.steps;
        stats.total_iterations += res.iterations;
        stats.nonconverged_steps += res.converged ? 0 : 1;
        record(tr, lyt, state, t);
    }
    return tr;
}

double sign_of(double v, double eps) noexcept
{
    return v > eps ? 1.0 : v < -eps ? -1.0 : 0.0;
}

// Logic-level engine: once per quarter the switching zone settles to the sign of the field
// produced by pinned cells, the holding and releasing zones and its own resolved cells.
// Cells resolve in wavefront rounds, then simultaneous sign sweeps repair
// any cell committed before all of its drivers were known.
class zone_resolver
{
  public:
    zone_resolver(const coupling_table& table, double eps, std::size_t n) :
            table_{table},
            eps_{eps},
            strong_{0.5 * table.max_energy()},
            field_(n, 0.0),
            active_(n, 0),
            next_(n, 0.0)
    {}

    // work: visible values on entry, zero for `cells`; resolved signs on exit. `bias` adds a
    // field of bias·prior[i] to each cell (0 disables it). Returns {sweeps used, converged}.
    std::pair<std::size_t, bool> run(const std::vector<std::size_t>& cells, std::vector<double>& work,
                                     const std::vector<double>& prior, double bias)
    {
        std::vector<std::size_t> pending;
        for (const auto i : cells)
        {
            active_[i] = 1;
            pending.push_back(i);
        }
        // wavefront rounds: every cell with a strong driven field commits at once, so signals
        // advance one cell per round and equal-length arms meet at a gate together; with no
        // strong cell left the strongest weak cell commits
        std::vector<std::size_t> batch;
        while (!pending.empty())
        {
            double top = 0.0;
            for (const auto i : pending)
            {
                field_[i] = bias * prior[i];
                for (const auto& nb : table_.neighbors(i))
                {
                    if (active_[nb.index] != 1)
                        field_[i] += nb.energy * work[nb.index];
                }
                top = std::max(top, std::abs(field_[i]));
            }
            if (top <= eps_)
                break;
            const double cut = top >= strong_ ? strong_ : top * (1.0 - 1e-12);
            batch.clear();
            for (const auto i : pending)
            {
                if (std::abs(field_[i]) >= cut)
                    batch.push_back(i);
            }
            for (const auto i : batch)
            {
                work[i]    = sign_of(field_[i], eps_);
                active_[i] = 2;
            }
            std::erase_if(pending, [this](std::size_t i) { return active_[i] == 2; });
        }
        for (const auto i : cells)
            active_[i] = 0;
        return sweep(cells, work, prior, bias);
    }

    // Simultaneous sign updates of `cells` starting from their values in `work`.
    std::pair<std::size_t, bool> sweep(const std::vector<std::size_t>& cells, std::vector<double>& work,
                                       const std::vector<double>& prior, double bias)
    {
        const auto max_sweeps = 2 * cells.size() + 4;
        std::size_t sweeps    = 0;
        bool converged        = false;
        for (; sweeps < max_sweeps; ++sweeps)
        {
            for (const auto i : cells)
            {
                double f = bias * prior[i];
                for (const auto& nb : table_.neighbors(i))
                    f += nb.energy * work[nb.index];
                next_[i] = sign_of(f, eps_);
            }
            bool changed = false;
            for (const auto i : cells)
            {
                changed = changed || next_[i] != work[i];
                work[i] = next_[i];
            }
            if (!changed)
            {
                converged = true;
                break;
            }
        }
        return {sweeps + 1, converged};
    }

  private:
    const coupling_table& table_;
    double eps_;
    double strong_;
    std::vector<double> field_;
    std::vector<std::uint8_t> active_;
    std::vector<double> next_;
};

trace simulate_digital(const layout& lyt, const waveform_program& program, const clock_schedule& sched,
                       const engine_config& cfg, simulation_stats& stats)
{
    const coupling_table table{lyt, cfg};
    const double eps         = 1e-9 * table.max_energy();
    const double memory_bias = 1e-6 * table.max_energy();
    auto tr                  = empty_trace(lyt);
    const auto n             = lyt.cells.size();
    std::vector<double> state(n, 0.0);

    std::array<std::vector<std::size_t>, 4> zone_cells;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (lyt.cells[i].func == cell_function::normal || lyt.cells[i].func == cell_function::output)
            zone_cells[static_cast<std::size_t>(lyt.cells[i].zone)].push_back(i);
    }

    std::vector<std::uint8_t> pinned(n, 0);
    std::vector<double> pins;
    const auto per_quarter = sched.samples_per_cycle / 4;
    std::vector<double> work(n, 0.0);
    zone_resolver resolver{table, eps, n};
    std::vector<std::size_t> latched;

    for (std::size_t q = 0; q < program.cycles * 4; ++q)
    {
        const auto zone    = static_cast<int>(q % 4);
        const auto hold    = (zone + 3) % 4;
        const auto release = (zone + 2) % 4;
        pins = pins_for(lyt, drivers_for_quarter(lyt, program, q));
        for (std::size_t i = 0; i < n; ++i)
        {
            pinned[i] = std::isnan(pins[i]) ? 0 : 1;
            if (pinned[i])
                state[i] = pins[i];
        }
        // the holding zone re-settles from its latched values against changed drivers (a
        // releasing zone is pinned by hysteresis); a weak bias keeps the latched value on ties
        if (q == 0)
        {
            // power-up: the zones that start at a low barrier polarize from the pins alone
            latched.clear();
            for (std::size_t i = 0; i < n; ++i)
            {
                const auto z = lyt.cells[i].zone;
                const bool low = !pinned[i] && (z == hold || z == release);
                work[i]        = pinned[i] ? state[i] : 0.0;
                if (low)
                    latched.push_back(i);
            }
            const auto [sweeps, settled] = resolver.run(latched, work, state, 0.0);
            stats.total_iterations += sweeps;
            stats.nonconverged_steps += settled ? 0 : 1;
            for (const auto i : latched)
                state[i] = work[i];
        }
        else
        {
            latched.clear();
            for (std::size_t i = 0; i < n; ++i)
            {
                const auto z = lyt.cells[i].zone;
                const bool held = !pinned[i] && z == hold;
                work[i]         = (held || pinned[i] || z == release) ? state[i] : 0.0;
                if (held)
                    latched.push_back(i);
            }
            const auto [sweeps, settled] = resolver.sweep(latched, work, state, memory_bias);
            stats.total_iterations += sweeps;
            stats.nonconverged_steps += settled ? 0 : 1;
            for (const auto i : latched)
                state[i] = work[i];
        }

        for (std::size_t i = 0; i < n; ++i)
        {
            const auto z       = lyt.cells[i].zone;
            const bool visible = pinned[i] || (z == hold || z == release);
            work[i]            = visible ? state[i] : 0.0;
        }
        const auto& active          = zone_cells[static_cast<std::size_t>(zone)];
        const auto [sweeps, settled] = resolver.run(active, work, state, 0.0);
        ++stats.steps;
        stats.total_iterations += sweeps;
        stats.nonconverged_steps += settled ? 0 : 1;
        for (const auto i : active)
        {
            if (work[i] != 0.0)
                state[i] = work[i];
        }
        for (std::size_t s = 0; s < per_quarter; ++s)
            record(tr, lyt, state, static_cast<double>(q * per_quarter + s) * sched.dt_ps());
    }
    return tr;
}

}  // namespace

relax_result relax(const layout& lyt, const std::map<std::string, std::uint8_t>& drivers,
                   const std::array<double, 4>& gamma, const engine_config& cfg, const std::vector<double>* seed)
{
    cfg.check(lyt.pitch);
    const coupling_table table{lyt, cfg};
    jacobi_solver solver{lyt, table, cfg};
    std::vector<double> state = seed ? *seed : std::vector<double>(lyt.cells.size(), 0.0);
    if (state.size() != lyt.cells.size())
        throw engine_error("relax: seed size does not match the layout");
    auto res         = solver.run(state, pins_for(lyt, drivers), gamma);
    res.polarization = std::move(state);
    return res;
}

trace simulate(const layout& lyt, const waveform_program& program, const clock_schedule& sched,
               const engine_config& cfg, simulation_stats* stats)
{
    sched.check();
    cfg.check(lyt.pitch);
    for (const auto& [label, bits] : program.inputs)
    {
        if (!lyt.find_label(label, cell_function::input))
            throw engine_error("simulate: program drives unknown input '" + label + "'");
    }
    simulation_stats local;
    auto tr = cfg.kind == engine_kind::bistable ? simulate_bistable(lyt, program, sched, cfg, local) :
                                                  simulate_digital(lyt, program, sched, cfg, local);
    if (stats)
        *stats = local;
    return tr;
}

std::size_t hold_sample_index(int zone, std::size_t cycle, const clock_schedule& sched) noexcept
{
    const auto q = sched.samples_per_cycle / 4;
    return cycle * sched.samples_per_cycle + static_cast<std::size_t>(zone + 2) * q - 1;
}

digital_trace digitize(const trace& tr, const clock_schedule& sched, const engine_config& cfg)
{
    const auto cycles = tr.samples() / sched.samples_per_cycle;
    digital_trace out;
    out.cycles = cycles;
    for (const auto& [label, s] : tr.series)
    {
        const auto zit    = tr.zones.find(label);
        const int zone    = zit == tr.zones.end() ? 0 : zit->second;
        const auto iit    = tr.is_input.find(label);
        const bool input  = iit != tr.is_input.end() && iit->second;
        auto& bits        = out.bits[label];
        bits.reserve(cycles);
        for (std::size_t c = 0; c < cycles; ++c)
        {
            const auto idx = input ? (c + 1) * sched.samples_per_cycle - 1 : hold_sample_index(zone, c, sched);
            if (idx >= s.size())
            {
                bits.push_back(logic::x);
                continue;
            }
            const double p = s[idx];
            bits.push_back(p > cfg.digitize_threshold ? logic::one :
                           p < -cfg.digitize_threshold ? logic::zero :
                                                         logic::x);
        }
    }
    return out;
}

}  // namespace qcmm
