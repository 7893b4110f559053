#include "cli.hpp"

#include "qcmm/netlist_io.hpp"

#include <fmt/format.h>

#include <charconv>

namespace qcmm::cli
{

bool is_cmm_circuit(std::string_view name) noexcept
{
    return name == "neuron" || name == "vpair" || name == "hpair" || name == "array";
}

circuit make_circuit(const circuit_args& a)
{
    if (a.name == "neuron")
        return build_neuron(a.accumulate);
    if (a.name == "vpair")
        return build_vertical_pair(a.accumulate);
    if (a.name == "hpair")
        return build_horizontal_pair(a.accumulate);
    if (a.name == "array")
        return build_array({1, a.n, a.accumulate, a.delay});

    const auto kind = parse_gate_kind(a.name == "memory_loop" ? "memory" : a.name);
    if (!kind)
        throw usage_error{fmt::format("unknown circuit '{}'", a.name)};
    gate_spec spec;
    spec.kind       = *kind;
    spec.length     = a.length;
    spec.zone_start = a.zone_start;
    spec.zone_span  = a.span;
    if (a.orient == "east")
        spec.orient = orientation::east;
    else if (a.orient == "south")
        spec.orient = orientation::south;
    else if (a.orient == "west")
        spec.orient = orientation::west;
    else if (a.orient == "north")
        spec.orient = orientation::north;
    else
        throw usage_error{fmt::format("unknown orientation '{}'", a.orient)};
    return {make_gate(spec), {}};
}

std::uint64_t fnv1a(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string header_line(std::uint64_t seed, std::string_view config)
{
    return fmt::format("# qcmm {} seed={} config={:016x}\n", QCMM_VERSION, seed, fnv1a(config));
}

bit_vector parse_bits(std::string_view s)
{
    bit_vector bits;
    for (const char c : s)
    {
        if (c != '0' && c != '1')
            throw std::invalid_argument{fmt::format("'{}' is not a bit string", s)};
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    if (bits.empty())
        throw std::invalid_argument{"empty bit string"};
    return bits;
}

namespace
{

std::vector<std::string_view> split(std::string_view line, std::string_view seps)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size())
    {
        const auto b = line.find_first_not_of(seps, i);
        if (b == std::string_view::npos)
            break;
        const auto e = line.find_first_of(seps, b);
        out.push_back(line.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
        i = e == std::string_view::npos ? line.size() : e;
    }
    return out;
}

template <typename F>
void for_each_line(std::string_view text, F&& f)
{
    std::size_t lineno = 0;
    while (!text.empty())
    {
        const auto nl = text.find('\n');
        auto line     = text.substr(0, nl);
        text          = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineno;
        line = line.substr(0, line.find('#'));
        if (line.find_first_not_of(" \t\r") != std::string_view::npos)
            f(line, lineno);
    }
}

}  // namespace

std::vector<std::pair<bit_vector, bit_vector>> parse_pairs(std::string_view text)
{
    std::vector<std::pair<bit_vector, bit_vector>> pairs;
    for_each_line(text,
                  [&](std::string_view line, std::size_t lineno)
                  {
                      const auto f = split(line, " \t\r");
                      if (f.size() != 2)
                          throw parse_error{lineno, 1, "expected '<stimulus> <response>'"};
                      try
                      {
                          pairs.emplace_back(parse_bits(f[0]), parse_bits(f[1]));
                      }
                      catch (const std::invalid_argument& e)
                      {
                          throw parse_error{lineno, 1, e.what()};
                      }
                  });
    return pairs;
}

std::string write_expectation(const std::vector<expected_bit>& bits)
{
    std::string out = "label,cycle,value\n";
    for (const auto& b : bits)
        out += fmt::format("{},{},{}\n", b.label, b.cycle, to_char(b.value));
    return out;
}

std::vector<expected_bit> parse_expectation(std::string_view text)
{
    std::vector<expected_bit> bits;
    bool header = true;
    for_each_line(text,
                  [&](std::string_view line, std::size_t lineno)
                  {
                      const auto f = split(line, ",\r");
                      if (std::exchange(header, false) && f.size() == 3 && f[0] == "label")
                          return;
                      std::size_t cycle = 0;
                      if (f.size() != 3 || f[2].size() != 1
                          || std::from_chars(f[1].data(), f[1].data() + f[1].size(), cycle).ec != std::errc{})
                          throw parse_error{lineno, 1, "expected 'label,cycle,value'"};
                      const char v = f[2][0];
                      if (v != '0' && v != '1' && v != 'X')
                          throw parse_error{lineno, 1, fmt::format("bad value '{}'", v)};
                      bits.push_back({std::string{f[0]}, cycle,
                                      v == '0' ? logic::zero : v == '1' ? logic::one : logic::x});
                  });
    return bits;
}

}  // namespace qcmm::cli
