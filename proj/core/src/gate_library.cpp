#include "qcmm/gate_library.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <initializer_list>
#include <stdexcept>
#include <utility>

namespace qcmm
{

namespace
{

int mod4(int t) noexcept
{
    return ((t % 4) + 4) % 4;
}

}  // namespace

grid_builder::grid_builder(std::string name, double pitch) : name_{std::move(name)}, pitch_{pitch} {}

void grid_builder::put(int col, int row, std::uint32_t layer, entry e)
{
    const key k{col + origin_col_, row + origin_row_, static_cast<int>(layer)};
    if (cells_.contains(k))
    {
        throw layout_error{fmt::format("grid cell ({},{},{}) already occupied", k[0], k[1], k[2])};
    }
    e.tau += origin_tau_;
    cells_.emplace(k, std::move(e));
    order_.push_back(k);
}

void grid_builder::normal(int col, int row, int tau, std::uint32_t layer)
{
    put(col, row, layer, {cell_function::normal, tau, std::nullopt, std::nullopt});
}

void grid_builder::fixed(int col, int row, double pol, std::uint32_t layer)
{
    put(col, row, layer, {cell_function::fixed, -origin_tau_, pol, std::nullopt});
}

void grid_builder::input(int col, int row, int tau, const std::string& label, std::uint32_t layer)
{
    put(col, row, layer, {cell_function::input, tau, std::nullopt, label});
}

void grid_builder::output(int col, int row, int tau, const std::string& label, std::uint32_t layer)
{
    put(col, row, layer, {cell_function::output, tau, std::nullopt, label});
}

void grid_builder::probe(int col, int row, const std::string& label, std::uint32_t layer)
{
    const key k{col + origin_col_, row + origin_row_, static_cast<int>(layer)};
    const auto it = cells_.find(k);
    if (it == cells_.end() || it->second.func != cell_function::normal)
    {
        throw layout_error{fmt::format("no normal cell at ({},{},{}) to probe", k[0], k[1], k[2])};
    }
    it->second.func  = cell_function::output;
    it->second.label = label;
}

int grid_builder::tau_at(int col, int row, std::uint32_t layer) const
{
    const auto it = cells_.find(key{col + origin_col_, row + origin_row_, static_cast<int>(layer)});
    if (it == cells_.end())
    {
        throw layout_error{fmt::format("no cell at ({},{},{})", col + origin_col_, row + origin_row_, layer)};
    }
    return it->second.tau - origin_tau_;
}

bool grid_builder::occupied(int col, int row, std::uint32_t layer) const
{
    return cells_.contains(key{col + origin_col_, row + origin_row_, static_cast<int>(layer)});
}

void grid_builder::route(const std::vector<std::array<int, 3>>& path, int tau_from, int tau_to, bool eager)
{
    if (path.size() < 2)
    {
        throw layout_error{"route needs at least two points"};
    }
    const auto n     = static_cast<int>(path.size()) - 1;
    const auto delta = tau_to - tau_from;
    if (delta < 0 || delta > n)
    {
        throw layout_error{fmt::format("route of {} cells cannot span {} clock quarters", n, delta)};
    }
    for (int i = 1; i <= n; ++i)
    {
        const auto& p = path[static_cast<std::size_t>(i)];
        const auto& q = path[static_cast<std::size_t>(i - 1)];
        const auto step = std::abs(p[0] - q[0]) + std::abs(p[1] - q[1]) + std::abs(p[2] - q[2]);
        if (step != 1 || p[2] < 0)
        {
            throw layout_error{fmt::format("route point {} is not adjacent to its predecessor", i)};
        }
        const auto tau = tau_from + (eager ? (i * delta + n - 1) / n : (2 * i * delta + n) / (2 * n));
        normal(p[0], p[1], tau, static_cast<std::uint32_t>(p[2]));
    }
}

layout grid_builder::build() const
{
    layout lyt{name_, pitch_, {}};
    lyt.cells.reserve(order_.size());
    for (const auto& k : order_)
    {
        const auto& e = cells_.at(k);
        cell c;
        c.id        = fmt::format("c{}_{}_{}", k[2], k[0], k[1]);
        c.pos       = {k[0] * pitch_, k[1] * pitch_, static_cast<std::uint32_t>(k[2])};
        c.zone      = static_cast<std::uint8_t>(mod4(e.tau));
        c.func      = e.func;
        c.fixed_pol = e.pol;
        c.label     = e.label;
        lyt.cells.push_back(std::move(c));
    }
    return lyt;
}

std::vector<std::array<int, 3>> straight(int c0, int r0, int c1, int r1, int layer)
{
    if (c0 != c1 && r0 != r1)
    {
        throw layout_error{"straight path must be axis-aligned"};
    }
    std::vector<std::array<int, 3>> out;
    const int dc = (c1 > c0) - (c1 < c0);
    const int dr = (r1 > r0) - (r1 < r0);
    for (int c = c0, r = r0;; c += dc, r += dr)
    {
        out.push_back({c, r, layer});
        if (c == c1 && r == r1)
        {
            break;
        }
    }
    return out;
}

std::vector<std::array<int, 3>> join(std::vector<std::vector<std::array<int, 3>>> parts)
{
    std::vector<std::array<int, 3>> out;
    for (auto& p : parts)
    {
        for (std::size_t i = 0; i < p.size(); ++i)
        {
            if (i == 0 && !out.empty() && out.back() == p[0])
            {
                continue;
            }
            out.push_back(p[i]);
        }
    }
    return out;
}

std::string_view to_string(gate_kind k) noexcept
{
    switch (k)
    {
        case gate_kind::wire: return "wire";
        case gate_kind::inverter: return "inverter";
        case gate_kind::majority: return "majority";
        case gate_kind::and_gate: return "and";
        case gate_kind::or_gate: return "or";
        case gate_kind::memory_loop: return "memory";
        case gate_kind::crossover: return "crossover";
    }
    return "?";
}

std::optional<gate_kind> parse_gate_kind(std::string_view s) noexcept
{
    for (const auto k : {gate_kind::wire, gate_kind::inverter, gate_kind::majority, gate_kind::and_gate,
                         gate_kind::or_gate, gate_kind::memory_loop, gate_kind::crossover})
    {
        if (to_string(k) == s)
        {
            return k;
        }
    }
    return std::nullopt;
}

layout make_wire(std::size_t n, int zone_start, std::size_t zone_span)
{
    if (n < 2)
    {
        throw std::invalid_argument{"a wire needs at least two cells"};
    }
    if (zone_span == 0)
    {
        throw std::invalid_argument{"zone span must be positive"};
    }
    grid_builder b{fmt::format("wire{}", n)};
    b.input(0, 0, zone_start, "in");
    for (std::size_t i = 1; i < n; ++i)
    {
        const auto tau = zone_start + static_cast<int>(i / zone_span);
        if (i + 1 == n)
        {
            b.output(static_cast<int>(i), 0, tau, "out");
        }
        else
        {
            b.normal(static_cast<int>(i), 0, tau);
        }
    }
    return b.build();
}

layout make_inverter(int zone_start)
{
    grid_builder b{"inverter"};
    b.set_origin(0, 0, zone_start);
    b.input(0, 1, 0, "a");
    for (const auto& [c, r] : {std::pair{1, 1}, {1, 0}, {1, 2}, {2, 0}, {3, 0}, {2, 2}, {3, 2}})
    {
        b.normal(c, r, 0);
    }
    b.normal(4, 1, 1);
    b.normal(5, 1, 1);
    b.output(6, 1, 1, "out");
    return b.build();
}

namespace
{

// Cross-shaped three-input gate centred at (3,3); every arm is two cells plus a driver at
// distance 3 so the inputs reach the centre with equal weight. A null label fixes that arm.
layout cross_gate(const std::string& name, int zone_start, const char* north, const char* west, const char* south,
                  double fixed_pol)
{
    grid_builder b{name};
    b.set_origin(0, 0, zone_start);
    const auto arm_end = [&](int c, int r, const char* label)
    {
        if (label != nullptr)
        {
            b.input(c, r, 0, label);
        }
        else
        {
            b.fixed(c, r, fixed_pol);
        }
    };
    arm_end(3, 0, north);
    arm_end(0, 3, west);
    arm_end(3, 6, south);
    for (const auto& [c, r] : {std::pair{3, 1}, {3, 2}, {1, 3}, {2, 3}, {3, 5}, {3, 4}, {3, 3}})
    {
        b.normal(c, r, 0);
    }
    b.normal(4, 3, 1);
    b.normal(5, 3, 1);
    b.output(6, 3, 1, "out");
    return b.build();
}

}  // namespace

layout make_majority(int zone_start)
{
    return cross_gate("majority", zone_start, "a", "b", "c", 0.0);
}

layout make_and(int zone_start)
{
    return cross_gate("and", zone_start, nullptr, "a", "b", -1.0);
}

layout make_or(int zone_start)
{
    return cross_gate("or", zone_start, nullptr, "a", "b", 1.0);
}

layout make_crossover(int zone_start)
{
    grid_builder b{"crossover"};
    b.set_origin(0, 0, zone_start);
    // main path along row 3
    b.input(0, 3, 0, "a");
    b.route(straight(0, 3, 7, 3), 0, 1);
    b.output(8, 3, 1, "a_out");
    // bridge: up a via stack at column 4 row 1, across on layer 2, down at row 5
    b.input(4, 0, 0, "b");
    b.route(join({straight(4, 0, 4, 1), {{4, 1, 1}, {4, 1, 2}}, straight(4, 1, 4, 5, 2), {{4, 5, 1}, {4, 5, 0}}}), 0,
            1);
    b.output(4, 6, 1, "b_out");
    return b.build();
}

void inverter_into(grid_builder& b, int oc, int orow, int fc, int fr, int tau, std::optional<double> source)
{
    const int lc = oc - 3 * fc;
    const int lr = orow - 3 * fr;
    if (source)
        b.fixed(lc, lr, *source);
    else
        b.normal(lc, lr, tau);
    for (const int side : {-1, 1})
    {
        const int sc = side * fr;
        const int sr = side * fc;
        for (int k = 0; k < 3; ++k)
            b.normal(lc + sc + k * fc, lr + sr + k * fr, tau);
    }
    b.normal(oc, orow, tau + 1);
}

void gate_arms(grid_builder& b, int c, int r, int tau, std::initializer_list<std::pair<int, int>> arms)
{
    b.normal(c, r, tau);
    for (const auto& [dc, dr] : arms)
    {
        b.normal(c + dc, r + dr, tau);
        b.normal(c + 2 * dc, r + 2 * dr, tau);
    }
}

std::vector<std::array<int, 3>> lead_in(grid_builder& b, std::array<int, 2> at, std::array<int, 2> dir,
                                        const std::string& label, int first_tau, int last_tau, std::uint32_t layer)
{
    b.input(at[0], at[1], first_tau, label, layer);
    for (int k = 1; k <= 8; ++k)
        b.normal(at[0] + k * dir[0], at[1] + k * dir[1], std::min(last_tau, first_tau + (k - 1) / 2), layer);
    return {{at[0] + 8 * dir[0], at[1] + 8 * dir[1], static_cast<int>(layer)}};
}

// AND(!we, m) sits at the top-left corner and OR(., AND(we, d)) at the top-right; all fixed
// cells lie outside the ring. At power-up the recirculation gate's fixed input resolves the
// loop to 0.
void place_memory_core(grid_builder& b, bool gated)
{
    // recirculation gate: loop enters from the south, !we from the north, fixed from the west
    gate_arms(b, 0, 0, 2, {{0, 1}, {0, -1}, {-1, 0}});
    b.fixed(-3, 0, -1.0);
    b.route(straight(0, 0, 3, 0), 2, 3, true);
    // write gate: loop from the west, write data from the north, fixed from the east
    gate_arms(b, 6, 0, 4, {{-1, 0}, {0, -1}, {1, 0}});
    b.fixed(9, 0, 1.0);
    b.route(join({straight(6, 0, 6, 3), straight(6, 3, 0, 3)}), 4, 5, true);
    // inverter flowing south, output held for three cells; ungated, a fixed 0 replaces its line
    // end and the recirculation gate becomes transparent
    inverter_into(b, 0, -5, 0, 1, 0, gated ? std::nullopt : std::optional{-1.0});
    b.normal(0, -4, 1);
    b.normal(0, -3, 1);
    if (gated)
        b.route(straight(0, -11, 0, -9), -1, 0, true);
    // AND(we, d) flowing west: d from the east, we from the north, fixed from the south
    gate_arms(b, 10, -5, 2, {{1, 0}, {0, -1}, {0, 1}});
    b.fixed(10, -2, -1.0);
    b.route(join({straight(10, -5, 6, -5), straight(6, -5, 6, -3)}), 2, 3, true);
    b.route(join({straight(0, -11, 10, -11), straight(10, -11, 10, -8)}), -1, 1, true);
}

// Inputs enter through lead-ins that start in absolute clock zone 0, so they switch exactly
// when the input changes; zone_start rotates the ring phase.
layout make_memory_loop(int zone_start)
{
    grid_builder b{"memory"};
    b.set_origin(0, 0, zone_start + 1);
    const int first = -1 - zone_start;
    (void)lead_in(b, {0, -19}, {0, 1}, "we", first, -1);
    place_memory_core(b, true);
    b.probe(6, 2, "m");
    b.route(join({lead_in(b, {24, -5}, {-1, 0}, "d", first, -1), straight(16, -5, 13, -5)}), -1, 1, true);
    // read tap
    b.route(straight(3, 3, 3, 7), 5, 6);
    b.probe(3, 7, "q");
    return b.build();
}

layout rotate(const layout& lyt, orientation o)
{
    layout out = lyt;
    for (auto& c : out.cells)
    {
        const auto x = c.pos.x;
        const auto y = c.pos.y;
        switch (o)
        {
            case orientation::east: break;
            case orientation::south: c.pos.x = -y; c.pos.y = x; break;
            case orientation::west: c.pos.x = -x; c.pos.y = -y; break;
            case orientation::north: c.pos.x = y; c.pos.y = -x; break;
        }
    }
    return out;
}

layout make_gate(const gate_spec& spec)
{
    layout lyt;
    switch (spec.kind)
    {
        case gate_kind::wire: lyt = make_wire(spec.length, spec.zone_start, spec.zone_span); break;
        case gate_kind::inverter: lyt = make_inverter(spec.zone_start); break;
        case gate_kind::majority: lyt = make_majority(spec.zone_start); break;
        case gate_kind::and_gate: lyt = make_and(spec.zone_start); break;
        case gate_kind::or_gate: lyt = make_or(spec.zone_start); break;
        case gate_kind::memory_loop: lyt = make_memory_loop(spec.zone_start); break;
        case gate_kind::crossover: lyt = make_crossover(spec.zone_start); break;
    }
    return rotate(lyt, spec.orient);
}

std::optional<gate_signature> signature_of(gate_kind k)
{
    switch (k)
    {
        case gate_kind::inverter:
            return gate_signature{{"a"}, "out", [](const std::vector<bool>& v) { return !v[0]; }};
        case gate_kind::majority:
            return gate_signature{{"a", "b", "c"}, "out", [](const std::vector<bool>& v)
                                  { return static_cast<int>(v[0]) + static_cast<int>(v[1]) + static_cast<int>(v[2]) >= 2; }};
        case gate_kind::and_gate:
            return gate_signature{{"a", "b"}, "out", [](const std::vector<bool>& v) { return v[0] && v[1]; }};
        case gate_kind::or_gate:
            return gate_signature{{"a", "b"}, "out", [](const std::vector<bool>& v) { return v[0] || v[1]; }};
        default: return std::nullopt;
    }
}

}  // namespace qcmm
