#include "qcmm/cmm_circuits.hpp"
#include "qcmm/engine.hpp"
#include "qcmm/gate_library.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

using namespace qcmm;

namespace
{

// Four dots on the corners of a square of side `spacing`. An electron pair on one diagonal
// leaves -e/2 on its dots and +e/2 on the empty ones.
double pair_energy(double dx, double dy, double dz, int pa, int pb, double spacing, double eps_r)
{
    constexpr double e    = 1.602176634e-19;
    constexpr double eps0 = 8.8541878128e-12;
    constexpr double pi   = 3.14159265358979323846;
    const double h        = spacing / 2.0;
    const std::array<std::array<double, 2>, 4> corner{{{h, h}, {-h, h}, {-h, -h}, {h, -h}}};
    const auto charge = [&](int pol, std::size_t k)
    {
        const bool main_diagonal = k % 2 == 0;
        return (main_diagonal == (pol > 0) ? -e : e) / 2.0;
    };
    double u = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
    {
        for (std::size_t j = 0; j < 4; ++j)
        {
            const double rx = dx + corner[j][0] - corner[i][0];
            const double ry = dy + corner[j][1] - corner[i][1];
            const double r  = std::sqrt(rx * rx + ry * ry + dz * dz) * 1e-9;
            u += charge(pa, i) * charge(pb, j) / (4.0 * pi * eps0 * eps_r * r);
        }
    }
    return u;
}

double oracle_kink(double dx, double dy, double dz, const engine_config& cfg)
{
    return pair_energy(dx, dy, dz, 1, -1, cfg.dot_spacing, cfg.relative_permittivity) -
           pair_energy(dx, dy, dz, 1, 1, cfg.dot_spacing, cfg.relative_permittivity);
}

cell at(const std::string& id, double x, double y, std::uint32_t layer = 0)
{
    cell c;
    c.id  = id;
    c.pos = {x, y, layer};
    return c;
}

digital_trace run(const layout& lyt, const waveform_program& p, engine_kind k, std::size_t threads = 1)
{
    engine_config cfg;
    cfg.kind    = k;
    cfg.threads = threads;
    const clock_schedule s;
    return digitize(simulate(lyt, p, s, cfg), s, cfg);
}

waveform_program random_program(const layout& lyt, std::size_t cycles, std::mt19937& rng)
{
    std::bernoulli_distribution coin{0.5};
    waveform_program p;
    for (const auto& label : lyt.labels(cell_function::input))
    {
        std::vector<std::uint8_t> seq(cycles);
        for (auto& b : seq)
            b = coin(rng) ? 1 : 0;
        p.set(label, seq);
    }
    return p;
}

waveform_program complement(waveform_program p)
{
    for (auto& [label, seq] : p.inputs)
    {
        for (auto& b : seq)
            b = b != 0 ? 0 : 1;
    }
    return p;
}

constexpr std::array engines{engine_kind::digital, engine_kind::bistable};

}  // namespace

TEST_CASE("kink energy matches the dot-pair oracle")
{
    const engine_config cfg;
    std::mt19937 rng{1};
    std::uniform_real_distribution<double> off(-60.0, 60.0);
    for (int trial = 0; trial < 500; ++trial)
    {
        const double dx = off(rng), dy = off(rng);
        const double dz = (trial % 3) * cfg.layer_separation;
        if (std::hypot(dx, dy) < 15.0 && dz == 0.0)
            continue;
        const double want = oracle_kink(dx, dy, dz, cfg);
        CHECK(kink_energy_offset(dx, dy, dz, cfg) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("kink energy is symmetric")
{
    const engine_config cfg;
    const auto a = at("a", 0, 0), b = at("b", 20, 20), c = at("c", 40, 0, 1);
    CHECK(kink_energy(a, b, cfg) == kink_energy(b, a, cfg));
    CHECK(kink_energy(a, c, cfg) == kink_energy(c, a, cfg));
}

TEST_CASE("side-by-side couples positively and diagonal negatively and weaker")
{
    const engine_config cfg;
    const double side = kink_energy(at("a", 0, 0), at("b", 20, 0), cfg);
    const double diag = kink_energy(at("a", 0, 0), at("b", 20, 20), cfg);
    CHECK(side > 0.0);
    CHECK(side == doctest::Approx(oracle_kink(20, 0, 0, cfg)).epsilon(1e-9));
    CHECK(diag < 0.0);
    CHECK(std::abs(diag) < std::abs(side));
}

TEST_CASE("kink energy rejects coincident and distant cells")
{
    const engine_config cfg;
    CHECK_THROWS_AS((void)kink_energy(at("a", 0, 0), at("b", 0, 0), cfg), engine_error);
    CHECK_THROWS_AS((void)kink_energy(at("a", 0, 0), at("b", 100, 0), cfg), engine_error);
}

TEST_CASE("clock gamma: hold, phase shift and period")
{
    const clock_schedule s;
    const double q = s.period_ps / 4.0;
    CHECK(clock_gamma(0, 1.5 * q, s) == s.gamma_low);
    CHECK(phase_at(0, 1.5 * q, s) == clock_phase::hold);
    for (double t = 0.0; t < 3.0 * s.period_ps; t += 3.7)
    {
        for (int z = 0; z < 4; ++z)
        {
            CHECK(clock_gamma(z, t + s.period_ps, s) == doctest::Approx(clock_gamma(z, t, s)));
            if (t >= z * q)
                CHECK(clock_gamma(z, t, s) == doctest::Approx(clock_gamma(0, t - z * q, s)));
        }
    }
    CHECK_THROWS_AS((void)clock_gamma(0, -1.0, s), std::invalid_argument);
}

TEST_CASE("config invariants are enforced")
{
    engine_config cfg;
    CHECK_NOTHROW(cfg.check(20.0));
    cfg.radius_of_effect = 10.0;
    CHECK_THROWS_AS(cfg.check(20.0), std::invalid_argument);
    cfg                    = {};
    cfg.digitize_threshold = 1.0;
    CHECK_THROWS_AS(cfg.check(20.0), std::invalid_argument);
    cfg                 = {};
    cfg.convergence_tol = 0.0;
    CHECK_THROWS_AS(cfg.check(20.0), std::invalid_argument);
}

TEST_CASE("relax: isolated cell stays unpolarized")
{
    layout l;
    auto in  = at("in", 0, 0);
    in.func  = cell_function::input;
    in.label = "in";
    auto out  = at("out", 400, 0);
    out.func  = cell_function::output;
    out.label = "out";
    l.cells   = {in, at("lonely", 200, 0), out};
    const clock_schedule s;
    const auto r = relax(l, {{"in", 1}}, {s.gamma_low, s.gamma_low, s.gamma_low, s.gamma_low}, engine_config{});
    CHECK(r.polarization[1] == 0.0);
    CHECK(r.converged);
}

TEST_CASE("relax: two-cell wire follower matches the scalar fixed point")
{
    layout l;
    auto in   = at("in", 0, 0);
    in.func   = cell_function::input;
    in.label  = "in";
    auto out  = at("out", 20, 0);
    out.func  = cell_function::output;
    out.label = "out";
    l.cells   = {in, out};
    const engine_config cfg;
    const clock_schedule s;
    // the follower's only neighbour is pinned, so one response evaluation is the fixed point
    const double x    = oracle_kink(20, 0, 0, cfg) / (2.0 * s.gamma_low);
    const double want = x / std::sqrt(1.0 + x * x);
    const auto r      = relax(l, {{"in", 1}}, {s.gamma_low, s.gamma_low, s.gamma_low, s.gamma_low}, cfg);
    CHECK(r.polarization[1] >= 0.9);
    CHECK(r.polarization[1] == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("relax: negating every driver negates every polarization")
{
    const auto l = make_majority();
    const clock_schedule s;
    const std::array<double, 4> g{s.gamma_low, s.gamma_low, s.gamma_low, s.gamma_low};
    for (int m = 0; m < 8; ++m)
    {
        const auto bit = [m](int k) { return static_cast<std::uint8_t>((m >> k) & 1); };
        const std::map<std::string, std::uint8_t> d{{"a", bit(0)}, {"b", bit(1)}, {"c", bit(2)}};
        std::map<std::string, std::uint8_t> nd;
        for (const auto& [k, v] : d)
            nd[k] = v != 0 ? 0 : 1;
        const auto p = relax(l, d, g, engine_config{}).polarization;
        const auto n = relax(l, nd, g, engine_config{}).polarization;
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(n[i] == doctest::Approx(-p[i]).epsilon(1e-12));
    }
}

TEST_CASE("single neuron under the coincidence program")
{
    // x=(0,0,1,1,1), y=(0,1,0,1,0): the memory sets on the fourth presentation only
    const auto c = build_neuron(true);
    const std::vector<presentation> session{
        {{0}, bit_vector{0}}, {{0}, bit_vector{1}}, {{1}, bit_vector{0}}, {{1}, bit_vector{1}}, {{1}, bit_vector{0}}};
    const auto program = program_for(c.plan, session);
    for (const auto k : engines)
    {
        const auto dt = run(c.lyt, program, k);
        for (std::size_t i = 0; i < session.size(); ++i)
        {
            const auto m = read_slots(c.plan.memories, dt, i * c.plan.window)[0];
            const auto z = read_slots(c.plan.outputs, dt, i * c.plan.window)[0];
            CHECK(m == (i >= 3 ? logic::one : logic::zero));
            CHECK(z == (i == 4 ? logic::one : logic::zero));
        }
    }
}

TEST_CASE("all-zero program leaves every labelled cell at 0")
{
    for (const auto& l : {make_wire(8), make_majority(), make_and(), make_or(), make_crossover()})
    {
        waveform_program p;
        for (const auto& label : l.labels(cell_function::input))
            p.set(label, std::vector<std::uint8_t>(6, 0));
        for (const auto k : engines)
        {
            const auto dt = run(l, p, k);
            for (const auto& [label, bits] : dt.bits)
            {
                for (const auto b : bits)
                    CHECK(b == logic::zero);
            }
        }
    }
}

TEST_CASE("simulation is deterministic across runs and thread counts")
{
    const auto c = build_array({1, 2, false, 4});
    const auto p = plan_training({1, 2, false, 4}, {{{1}, {1, 0}}});
    engine_config cfg;
    const clock_schedule s;
    const auto a = simulate(c.lyt, p, s, cfg);
    const auto b = simulate(c.lyt, p, s, cfg);
    cfg.threads  = 4;
    const auto t = simulate(c.lyt, p, s, cfg);
    CHECK(a == b);
    CHECK(a == t);
    for (const auto& [label, series] : a.series)
    {
        for (const double v : series)
            CHECK((v >= -1.0 && v <= 1.0));
    }
}

TEST_CASE("complementing the program complements the digital trace")
{
    std::mt19937 rng{4};
    for (const auto& l : {make_wire(12), make_inverter(), make_majority(), make_crossover(1)})
    {
        const auto p = random_program(l, 10, rng);
        for (const auto k : engines)
        {
            const auto a = run(l, p, k);
            const auto b = run(l, complement(p), k);
            for (const auto& [label, bits] : a.bits)
            {
                for (std::size_t i = 0; i < bits.size(); ++i)
                    CHECK(b.bits.at(label)[i] == complement(bits[i]));
            }
        }
    }
}

TEST_CASE("wires deliver the bit after the scheduled number of periods")
{
    std::mt19937 rng{6};
    for (const std::size_t n : {2U, 8U, 12U, 16U, 40U})
    {
        const auto l        = make_wire(n, 0, 4);
        // 13 cycles so the last checked read of a late-zone output stays inside the trace
        const auto p        = random_program(l, 13, rng);
        // the last cell sits in unreduced zone (n-1)/4 and is read that many quarters later
        const auto lag      = ((n - 1) / 4) / 4;
        const auto& in_bits = p.inputs.at("in");
        for (const auto k : engines)
        {
            INFO("n=" << n << " engine " << static_cast<int>(k));
            const auto dt = run(l, p, k);
            for (std::size_t cy = lag; cy + 1 < in_bits.size(); ++cy)
                CHECK(dt.at("out", cy) == (in_bits[cy - lag] != 0 ? logic::one : logic::zero));
        }
    }
}

TEST_CASE("digitize: constant polarization and sub-threshold samples")
{
    const clock_schedule s;
    const engine_config cfg;
    trace tr;
    const std::size_t n = 3 * s.samples_per_cycle;
    for (std::size_t i = 0; i < n; ++i)
        tr.times_ps.push_back(static_cast<double>(i) * s.dt_ps());
    tr.series["hi"]  = std::vector<double>(n, 1.0);
    tr.series["mid"] = std::vector<double>(n, 0.2);
    tr.zones         = {{"hi", 2}, {"mid", 1}};
    tr.is_input      = {{"hi", false}, {"mid", false}};
    const auto dt    = digitize(tr, s, cfg);
    CHECK(dt.bits.at("hi") == std::vector<logic>(dt.cycles, logic::one));
    CHECK(dt.bits.at("mid") == std::vector<logic>(dt.cycles, logic::x));
}

TEST_CASE("program driving an unknown input is rejected")
{
    waveform_program p;
    p.set("in", {1, 0});
    p.set("bogus", {1, 0});
    CHECK_THROWS_AS((void)simulate(make_wire(4), p, clock_schedule{}, engine_config{}), engine_error);
}
