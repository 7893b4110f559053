#include "cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace qcmm;

namespace
{

struct result
{
    int code;
    std::string out;
    std::string err;
};

result qcmm_run(std::vector<std::string> args)
{
    args.insert(args.begin(), "qcmm");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path tmp(const std::string& name)
{
    const fs::path dir{QCMM_TEST_TMP};
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in{p};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text)
{
    std::ofstream{p} << text;
}

std::string first_line(const std::string& s)
{
    return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("build writes a netlist with a header line")
{
    const auto net = tmp("array4.qcn");
    const auto r   = qcmm_run({"--seed", "5", "build", "--circuit", "array", "--n", "4", "-o", net.string()});
    CHECK(r.code == cli::exit_ok);
    const auto text = slurp(net);
    CHECK(text.rfind("# qcmm ", 0) == 0);
    CHECK(first_line(text).find("seed=5") != std::string::npos);
    CHECK(first_line(text).find("config=") != std::string::npos);
}

TEST_CASE("usage errors exit 2")
{
    CHECK(qcmm_run({"build", "--circuit", "array", "--n", "0", "-o", tmp("x.qcn").string()}).code == cli::exit_usage);
    CHECK(qcmm_run({"build", "--circuit", "nand", "-o", tmp("x.qcn").string()}).code == cli::exit_usage);
    CHECK(qcmm_run({"density", "--area-nm2", "0"}).code == cli::exit_usage);
    CHECK(qcmm_run({"frobnicate"}).code == cli::exit_usage);
    CHECK(qcmm_run({}).code == cli::exit_usage);
    CHECK(qcmm_run({"--help"}).code == cli::exit_ok);
}

TEST_CASE("config hash ignores output paths")
{
    const auto a = tmp("h1.qcn"), b = tmp("h2.qcn");
    REQUIRE(qcmm_run({"build", "--circuit", "majority", "-o", a.string()}).code == 0);
    REQUIRE(qcmm_run({"build", "--circuit", "majority", "-o", b.string()}).code == 0);
    CHECK(slurp(a) == slurp(b));
    const auto c = tmp("h3.qcn");
    REQUIRE(qcmm_run({"build", "--circuit", "majority", "--zone-start", "1", "-o", c.string()}).code == 0);
    CHECK(first_line(slurp(a)) != first_line(slurp(c)));
}

TEST_CASE("oracle, sim and compare agree on a stored pair, then catch a corrupted bit")
{
    const auto pairs = tmp("pairs.txt"), prog = tmp("p.wav"), expect = tmp("e.csv");
    const auto net = tmp("n4.qcn"), an = tmp("a.csv"), dig = tmp("d.csv");
    spit(pairs, "# one pair\n1 1001\n");
    REQUIRE(qcmm_run({"build", "--circuit", "array", "--n", "4", "-o", net.string()}).code == 0);
    const auto o = qcmm_run({"oracle", "--pairs", pairs.string(), "--circuit", "array", "--n", "4", "--program",
                             prog.string(), "--expect", expect.string()});
    REQUIRE(o.code == 0);
    CHECK(o.out.find("1001") != std::string::npos);

    REQUIRE(qcmm_run({"sim", "--netlist", net.string(), "--program", prog.string(), "--engine", "digital", "--analog",
                      an.string(), "--digital", dig.string()})
                .code == 0);
    CHECK(qcmm_run({"compare", "--trace", dig.string(), "--expect", expect.string()}).code == cli::exit_ok);

    auto bits = cli::parse_expectation(slurp(expect));
    REQUIRE_FALSE(bits.empty());
    auto& flip = bits.back();
    flip.value = flip.value == logic::one ? logic::zero : logic::one;
    const auto bad = tmp("bad.csv");
    spit(bad, cli::write_expectation(bits));
    const auto c = qcmm_run({"compare", "--trace", dig.string(), "--expect", bad.string()});
    CHECK(c.code == cli::exit_failure);
    CHECK(c.out.find(flip.label) != std::string::npos);
}

TEST_CASE("sim rejects a program missing an input")
{
    const auto net = tmp("n2.qcn"), prog = tmp("partial.wav");
    REQUIRE(qcmm_run({"build", "--circuit", "neuron", "-o", net.string()}).code == 0);
    spit(prog, "x_in: 1 0\n");
    const auto r = qcmm_run({"sim", "--netlist", net.string(), "--program", prog.string(), "--analog",
                             tmp("a2.csv").string(), "--digital", tmp("d2.csv").string()});
    CHECK(r.code == cli::exit_failure);
    CHECK(r.err.find("y_in") != std::string::npos);
}

TEST_CASE("sim refuses the same path for two outputs")
{
    const auto net = tmp("w.qcn"), prog = tmp("w.wav"), same = tmp("same.csv");
    REQUIRE(qcmm_run({"build", "--circuit", "wire", "-o", net.string()}).code == 0);
    spit(prog, "in: 1 0 1\n");
    CHECK(qcmm_run({"sim", "--netlist", net.string(), "--program", prog.string(), "--analog", same.string(),
                    "--digital", same.string()})
              .code == cli::exit_usage);
}

TEST_CASE("truth and density print their results")
{
    const auto t = qcmm_run({"truth", "--gate", "majority", "--engine", "digital"});
    CHECK(t.code == 0);
    CHECK(t.out.find("8/8") != std::string::npos);
    const auto d = qcmm_run({"density", "--area-nm2", "415"});
    CHECK(d.code == 0);
    CHECK(d.out.find("GB") != std::string::npos);
}

TEST_CASE("pair and expectation formats")
{
    const auto p = cli::parse_pairs("101 01\n# skip\n\n000 11 # tail\n");
    REQUIRE(p.size() == 2);
    CHECK(p[0].first == bit_vector{1, 0, 1});
    CHECK(p[1].second == bit_vector{1, 1});
    CHECK_THROWS((void)cli::parse_bits("10a"));
    const std::vector<expected_bit> e{{"z_out", 3, logic::one}, {"M1", 4, logic::zero}};
    CHECK(cli::parse_expectation(cli::write_expectation(e)) == e);
    CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
