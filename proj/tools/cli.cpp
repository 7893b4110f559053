#include "cli.hpp"

#include "qcmm/density.hpp"
#include "qcmm/engine.hpp"
#include "qcmm/netlist_io.hpp"
#include "qcmm/verify.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace qcmm::cli
{

namespace
{

// Reference figures the density report is compared against.
constexpr double reference_neurons_per_cm2 = 240.5e9;
constexpr double reference_gb_per_cm2      = 28.0;

std::string read_file(const std::string& path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw std::runtime_error{fmt::format("cannot read '{}'", path)};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out{path, std::ios::binary};
    out << text;
    if (!out)
        throw std::runtime_error{fmt::format("cannot write '{}'", path)};
}

void require_distinct(std::initializer_list<const std::string*> paths)
{
    std::set<std::string> seen;
    for (const auto* p : paths)
    {
        if (!p->empty() && !seen.insert(*p).second)
            throw usage_error{fmt::format("path '{}' is given twice", *p)};
    }
}

nlohmann::json to_json(const std::vector<sample_slot>& slots)
{
    auto arr = nlohmann::json::array();
    for (const auto& s : slots)
        arr.push_back({{"label", s.label}, {"row", s.row}, {"col", s.col}, {"offset", s.offset}});
    return arr;
}

nlohmann::json to_json(const schedule_plan& p)
{
    return {{"stimulus_inputs", p.stimulus_inputs},
            {"response_inputs", p.response_inputs},
            {"launch_offset", p.launch_offset},
            {"outputs", to_json(p.outputs)},
            {"memories", to_json(p.memories)},
            {"arrivals", to_json(p.arrivals)},
            {"window", p.window},
            {"train_cycles", p.train_cycles},
            {"recall_cycles", p.recall_cycles}};
}

std::string bits_string(const bit_vector& v)
{
    std::string s;
    for (const auto b : v)
        s += static_cast<char>('0' + b);
    return s;
}

threshold_strategy parse_threshold(const std::string& s, const bit_vector& probe)
{
    if (s == "willshaw")
    {
        const auto ones = std::count(probe.begin(), probe.end(), std::uint8_t{1});
        return threshold_strategy::willshaw(std::max<long>(ones, 1));
    }
    const auto colon = s.find(':');
    const auto kind  = s.substr(0, colon);
    long param       = 1;
    if (colon != std::string::npos)
    {
        try
        {
            param = std::stol(s.substr(colon + 1));
        }
        catch (const std::exception&)
        {
            throw usage_error{fmt::format("bad threshold parameter in '{}'", s)};
        }
    }
    if (kind == "fixed")
        return threshold_strategy::fixed(param);
    if (kind == "lmax")
        return threshold_strategy::lmax(param);
    throw usage_error{fmt::format("unknown threshold '{}' (fixed:<theta>, willshaw, lmax:<L>)", s)};
}

struct engine_args
{
    std::string engine{"bistable"};
    std::size_t threads{1};
    double radius{65.0};
    double tol{1e-3};
    std::size_t max_iterations{100};
    double period_ps{100.0};
    std::size_t samples{32};

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--threads", threads, "Worker threads per relaxation sweep")->check(CLI::PositiveNumber);
        cmd.add_option("--radius", radius, "Radius of effect (nm)")->check(CLI::PositiveNumber);
        cmd.add_option("--tol", tol, "Convergence tolerance")->check(CLI::PositiveNumber);
        cmd.add_option("--max-iterations", max_iterations, "Relaxation iteration cap")->check(CLI::PositiveNumber);
        cmd.add_option("--period-ps", period_ps, "Clock period (ps)")->check(CLI::PositiveNumber);
        cmd.add_option("--samples-per-cycle", samples, "Time steps per clock cycle")->check(CLI::Range(4, 4096));
    }

    [[nodiscard]] engine_config config(engine_kind kind) const
    {
        engine_config cfg;
        cfg.kind             = kind;
        cfg.threads          = threads;
        cfg.radius_of_effect = radius;
        cfg.convergence_tol  = tol;
        cfg.max_iterations   = max_iterations;
        return cfg;
    }

    [[nodiscard]] clock_schedule schedule() const
    {
        clock_schedule s;
        s.period_ps         = period_ps;
        s.samples_per_cycle = samples;
        return s;
    }
};

engine_kind parse_engine(const std::string& s)
{
    return s == "digital" ? engine_kind::digital : engine_kind::bistable;
}

void add_circuit_options(CLI::App& cmd, circuit_args& a)
{
    cmd.add_option("--n", a.n, "Neurons in an array")->check(CLI::Range(std::size_t{1}, max_array_cols));
    cmd.add_flag("--accumulate", a.accumulate, "OR-accumulating memory instead of last write");
    cmd.add_option("--delay", a.delay, "Clock quarters between neurons on the shared wire")
        ->check(CLI::Range(0, max_inter_neuron_delay));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"QCA simulator and CMM neuron circuit generator"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Seed for randomized runs (recorded in every output header)");

    // the config hash skips output destinations; --program is skipped too since oracle writes it
    static const std::set<std::string_view> output_flags{"-o",       "--out",     "--plan",    "--analog",
                                                         "--digital", "--report", "--program", "--expect"};
    std::string config;
    for (int i = 1; i < argc; ++i)
    {
        const std::string_view arg{argv[i]};
        if (output_flags.count(arg.substr(0, arg.find('='))) != 0)
        {
            if (arg.find('=') == std::string_view::npos)
                ++i;
            continue;
        }
        config += fmt::format("{}\x1f", arg);
    }
    std::function<int()> action;

    // build
    circuit_args build_args;
    std::string build_out;
    std::string build_plan;
    auto* build = app.add_subcommand("build", "Generate a circuit netlist");
    build->add_option("--circuit", build_args.name, "Circuit to generate")
        ->required()
        ->check(CLI::IsMember({"wire", "inverter", "majority", "and", "or", "memory", "memory_loop", "crossover",
                               "neuron", "vpair", "hpair", "array"}));
    add_circuit_options(*build, build_args);
    build->add_option("--zone-start", build_args.zone_start, "First clock zone of a gate")->check(CLI::Range(0, 3));
    build->add_option("--length", build_args.length, "Wire length in cells")->check(CLI::Range(2, 4096));
    build->add_option("--span", build_args.span, "Wire cells per clock zone")->check(CLI::Range(1, 4096));
    build->add_option("--orient", build_args.orient, "Gate orientation")
        ->check(CLI::IsMember({"east", "south", "west", "north"}));
    build->add_option("-o,--out", build_out, "Netlist file")->required();
    build->add_option("--plan", build_plan, "Schedule plan JSON file (CMM circuits)");
    build->callback(
        [&]
        {
            action = [&]
            {
                require_distinct({&build_out, &build_plan});
                const auto c = make_circuit(build_args);
                write_file(build_out, header_line(seed, config) + serialize_netlist(c.lyt));
                if (!build_plan.empty())
                    write_file(build_plan, to_json(c.plan).dump(2) + "\n");
                out << fmt::format("{}: {} cells, {:.0f} nm2\n", c.lyt.name, c.lyt.size(), footprint(c.lyt));
                return exit_ok;
            };
        });

    // sim
    std::string sim_netlist;
    std::string sim_program;
    std::string sim_analog;
    std::string sim_digital;
    engine_args sim_engine;
    auto* sim = app.add_subcommand("sim", "Simulate a netlist under a waveform program");
    sim->add_option("--netlist", sim_netlist, "Netlist file")->required();
    sim->add_option("--program", sim_program, "Waveform program file")->required();
    sim->add_option("--engine", sim_engine.engine, "Engine")->check(CLI::IsMember({"digital", "bistable"}));
    sim->add_option("--analog", sim_analog, "Analog CSV output")->required();
    sim->add_option("--digital", sim_digital, "Digital CSV output")->required();
    sim_engine.add_to(*sim);
    sim->callback(
        [&]
        {
            action = [&]
            {
                require_distinct({&sim_netlist, &sim_program, &sim_analog, &sim_digital});
                const auto lyt = parse_netlist(read_file(sim_netlist));
                if (const auto diags = validate(lyt); !diags.empty())
                {
                    for (const auto& d : diags)
                        err << fmt::format("netlist: {} {}: {}\n", d.cell_id, d.rule, d.message);
                    return exit_failure;
                }
                const auto program = parse_program(read_file(sim_program));
                for (const auto& label : lyt.labels(cell_function::input))
                {
                    if (program.inputs.count(label) == 0)
                    {
                        err << fmt::format("program does not drive input '{}'\n", label);
                        return exit_failure;
                    }
                }
                const auto cfg   = sim_engine.config(parse_engine(sim_engine.engine));
                const auto sched = sim_engine.schedule();
                simulation_stats stats;
                const auto tr = simulate(lyt, program, sched, cfg, &stats);
                if (stats.nonconverged_steps > 0)
                {
                    err << fmt::format("warning: {} of {} steps did not converge within {} iterations\n",
                                       stats.nonconverged_steps, stats.steps, cfg.max_iterations);
                }
                const auto head = header_line(seed, config);
                write_file(sim_analog, head + write_trace(tr));
                write_file(sim_digital, head + write_trace(digitize(tr, sched, cfg)));
                return exit_ok;
            };
        });

    // compare
    std::string cmp_trace;
    std::string cmp_expect;
    std::string cmp_report;
    auto* cmp = app.add_subcommand("compare", "Check a digital trace against an expectation file");
    cmp->add_option("--trace", cmp_trace, "Digital CSV from sim")->required();
    cmp->add_option("--expect", cmp_expect, "Expectation file from oracle")->required();
    cmp->add_option("--report", cmp_report, "Report file (default: stdout)");
    cmp->callback(
        [&]
        {
            action = [&]
            {
                require_distinct({&cmp_trace, &cmp_expect, &cmp_report});
                const auto result = compare(parse_digital_trace(read_file(cmp_trace)),
                                            parse_expectation(read_file(cmp_expect)));
                std::string report = header_line(seed, config);
                report += fmt::format("{:<16} {:>8} {:>10}\n", "signal", "checked", "mismatched");
                for (const auto& [label, counts] : result.signals)
                    report += fmt::format("{:<16} {:>8} {:>10}\n", label, counts.first, counts.second);
                report += fmt::format("mismatches: {}\n", result.mismatches.size());
                for (const auto& m : result.mismatches)
                {
                    report += fmt::format("  cycle {} signal {}: expected {} got {}\n", m.cycle, m.label,
                                          to_char(m.expected), to_char(m.got));
                }
                if (cmp_report.empty())
                    out << report;
                else
                    write_file(cmp_report, report);
                return result.ok() ? exit_ok : exit_failure;
            };
        });

    // density
    double area = 0.0;
    bool show_footprint = false;
    auto* dens = app.add_subcommand("density", "Storage density for a per-neuron area");
    dens->add_option("--area-nm2", area, "Area per neuron (nm2)")->required();
    dens->add_flag("--neuron-footprint", show_footprint, "Also report the generated neuron's bounding box");
    dens->callback(
        [&]
        {
            action = [&]
            {
                if (!(area > 0.0) || !std::isfinite(area))
                    throw usage_error{fmt::format("--area-nm2 must be positive, got {}", area)};
                const auto r = density(area);
                out << fmt::format("area:      {} nm2/neuron\n", r.area_per_neuron_nm2);
                out << fmt::format("neurons:   {:.2f}e9 neurons/cm2\n", r.neurons_per_cm2 / 1e9);
                out << fmt::format("storage:   {:.2f} GB/cm2, {:.2f} GiB/cm2\n", r.gb_per_cm2, r.gib_per_cm2);
                out << fmt::format("reference: {:.1f}e9 neurons/cm2 ({:+.2f}%)\n", reference_neurons_per_cm2 / 1e9,
                                   100.0 * (r.neurons_per_cm2 / reference_neurons_per_cm2 - 1.0));
                out << fmt::format("reference: {:.0f} GB/cm2 read as GiB ({:+.2f}%)\n", reference_gb_per_cm2,
                                   100.0 * (r.gib_per_cm2 / reference_gb_per_cm2 - 1.0));
                if (show_footprint)
                {
                    const auto lyt = build_neuron().lyt;
                    const auto fp  = footprint(lyt);
                    out << fmt::format("generated neuron: {} cells, {:.0f} nm2 ({:.2f}e9 neurons/cm2)\n", lyt.size(),
                                       fp, density(fp).neurons_per_cm2 / 1e9);
                }
                return exit_ok;
            };
        });

    // truth
    std::string gate;
    std::string truth_engine{"both"};
    int truth_zone = 0;
    engine_args truth_cfg;
    auto* truth = app.add_subcommand("truth", "Simulated truth table of a gate");
    truth->add_option("--gate", gate, "Gate")->required()->check(
        CLI::IsMember({"inverter", "majority", "and", "or"}));
    truth->add_option("--engine", truth_engine, "Engine")->check(CLI::IsMember({"digital", "bistable", "both"}));
    truth->add_option("--zone-start", truth_zone, "First clock zone")->check(CLI::Range(0, 3));
    truth_cfg.add_to(*truth);
    truth->callback(
        [&]
        {
            action = [&]
            {
                const auto kind = *parse_gate_kind(gate);
                const auto sig  = *signature_of(kind);
                const auto lyt  = make_gate({kind, 8, truth_zone, orientation::east, 4});
                std::vector<engine_kind> kinds;
                if (truth_engine != "bistable")
                    kinds.push_back(engine_kind::digital);
                if (truth_engine != "digital")
                    kinds.push_back(engine_kind::bistable);
                bool all = true;
                for (const auto k : kinds)
                {
                    const auto rows = sweep_truth_table(lyt, sig, truth_cfg.config(k), truth_cfg.schedule());
                    std::size_t pass = 0;
                    out << fmt::format("{} ({}):\n", gate, k == engine_kind::digital ? "digital" : "bistable");
                    for (const auto& r : rows)
                    {
                        std::string in;
                        for (const bool b : r.inputs)
                            in += fmt::format("{} ", b ? 1 : 0);
                        out << fmt::format("  {}-> expected {} got {}  {}\n", in, r.expected ? 1 : 0, to_char(r.got),
                                           r.pass() ? "PASS" : "FAIL");
                        pass += r.pass() ? 1 : 0;
                    }
                    out << fmt::format("  {}/{} pass\n", pass, rows.size());
                    all = all && pass == rows.size();
                }
                return all ? exit_ok : exit_failure;
            };
        });

    // oracle
    std::string pairs_file;
    std::size_t random_pairs = 0;
    std::size_t rand_rows    = 4;
    std::size_t rand_cols    = 4;
    std::vector<std::string> probes;
    std::string threshold{"fixed:1"};
    std::string oracle_report;
    std::string oracle_program;
    std::string oracle_expect;
    circuit_args oracle_circuit;
    auto* orc = app.add_subcommand("oracle", "Reference correlation matrix memory");
    auto* pf  = orc->add_option("--pairs", pairs_file, "Training pairs file ('<stimulus> <response>' per line)");
    orc->add_option("--random", random_pairs, "Draw this many random pairs instead (uses --seed)")
        ->excludes(pf)
        ->check(CLI::Range(1, 64));
    orc->add_option("--rows", rand_rows, "Stimulus width for --random")->check(CLI::Range(1, 64));
    orc->add_option("--cols", rand_cols, "Response width for --random")->check(CLI::Range(1, 64));
    orc->add_option("--probe", probes, "Recall probe bits (default: each stored stimulus)");
    orc->add_option("--threshold", threshold, "fixed:<theta>, willshaw or lmax:<L>");
    orc->add_option("--report", oracle_report, "JSON report file (default: text to stdout)");
    orc->add_option("--circuit", oracle_circuit.name, "Circuit for --program/--expect")
        ->check(CLI::IsMember({"neuron", "vpair", "hpair", "array"}));
    add_circuit_options(*orc, oracle_circuit);
    orc->add_option("--program", oracle_program, "Training/recall waveform program for the circuit");
    orc->add_option("--expect", oracle_expect, "Expected authoritative bits for the circuit");
    orc->callback(
        [&]
        {
            action = [&]
            {
                require_distinct({&pairs_file, &oracle_report, &oracle_program, &oracle_expect});
                std::vector<std::pair<bit_vector, bit_vector>> pairs;
                std::size_t rows = rand_rows;
                std::size_t cols = rand_cols;
                if (!pairs_file.empty())
                {
                    pairs = parse_pairs(read_file(pairs_file));
                    if (pairs.empty())
                        throw usage_error{"pairs file holds no pairs"};
                    rows = pairs.front().first.size();
                    cols = pairs.front().second.size();
                }
                else if (random_pairs > 0)
                {
                    std::mt19937_64 rng{seed};
                    std::bernoulli_distribution coin{0.5};
                    for (std::size_t k = 0; k < random_pairs; ++k)
                    {
                        bit_vector s(rows);
                        bit_vector r(cols);
                        for (auto& b : s)
                            b = coin(rng) ? 1 : 0;
                        for (auto& b : r)
                            b = coin(rng) ? 1 : 0;
                        pairs.emplace_back(std::move(s), std::move(r));
                    }
                }
                else
                {
                    throw usage_error{"oracle needs --pairs or --random"};
                }

                cmm memory{rows, cols};
                for (const auto& [s, r] : pairs)
                    memory = memory.train(s, r);
                std::vector<bit_vector> probe_bits;
                for (const auto& p : probes)
                    probe_bits.push_back(parse_bits(p));
                if (probe_bits.empty())
                    probe_bits = recall_probes(pairs);

                nlohmann::json report;
                report["rows"]    = rows;
                report["cols"]    = cols;
                report["trained"] = memory.trained();
                auto matrix       = nlohmann::json::array();
                for (std::size_t i = 0; i < rows; ++i)
                {
                    std::string row;
                    for (std::size_t j = 0; j < cols; ++j)
                        row += static_cast<char>('0' + memory.weight(i, j));
                    matrix.push_back(row);
                }
                report["matrix"]  = matrix;
                report["recalls"] = nlohmann::json::array();
                for (const auto& p : probe_bits)
                {
                    const auto r = memory.analyse(p, parse_threshold(threshold, p));
                    nlohmann::json j{{"probe", bits_string(p)}, {"raw", r.raw}, {"output", bits_string(r.thresholded)}};
                    if (r.noise)
                        j["noise"] = *r.noise;
                    if (r.residual)
                        j["residual"] = *r.residual;
                    report["recalls"].push_back(j);
                }
                if (oracle_report.empty())
                {
                    out << fmt::format("M ({}x{}, {} pairs):\n", rows, cols, memory.trained());
                    for (const auto& row : matrix)
                        out << "  " << row.get<std::string>() << "\n";
                    for (const auto& j : report["recalls"])
                    {
                        out << fmt::format("recall {} -> {} raw {}\n", j["probe"].get<std::string>(),
                                           j["output"].get<std::string>(), j["raw"].dump());
                    }
                }
                else
                {
                    write_file(oracle_report, header_line(seed, config) + report.dump(2) + "\n");
                }

                if (!oracle_program.empty() || !oracle_expect.empty())
                {
                    const auto c       = make_circuit(oracle_circuit);
                    const auto session = training_session(pairs);
                    if (!oracle_program.empty())
                        write_file(oracle_program, header_line(seed, config) + serialize_program(program_for(c.plan, session)));
                    if (!oracle_expect.empty())
                    {
                        write_file(oracle_expect, header_line(seed, config)
                                                      + write_expectation(expectation(c.plan, session, oracle_circuit.accumulate)));
                    }
                }
                return exit_ok;
            };
        });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e, out, err);
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    try
    {
        return action();
    }
    catch (const usage_error& e)
    {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace qcmm::cli
