#ifndef QCMM_TOOLS_CLI_HPP
#define QCMM_TOOLS_CLI_HPP

#include "qcmm/cmm_circuits.hpp"
#include "qcmm/gate_library.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcmm::cli
{

/// Exit codes: the stable contract for scripts.
inline constexpr int exit_ok      = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage   = 2;

/// Thrown by subcommands for bad arguments CLI11 cannot catch itself (exit 2).
class usage_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Parses argv and runs one subcommand: build, sim, compare, density, truth or oracle.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Circuit selection shared by build and oracle.
struct circuit_args
{
    std::string name{"neuron"};
    std::size_t n{4};
    bool accumulate{false};
    int delay{4};
    int zone_start{0};
    std::size_t length{8};
    std::size_t span{4};
    std::string orient{"east"};
};

[[nodiscard]] bool is_cmm_circuit(std::string_view name) noexcept;
/// Layout plus plan; gates get an empty plan. Throws usage_error for an unknown name.
[[nodiscard]] circuit make_circuit(const circuit_args& a);

/// 64-bit FNV-1a, used for the config hash in output headers.
[[nodiscard]] std::uint64_t fnv1a(std::string_view text) noexcept;
/// "# qcmm <version> seed=<seed> config=<hash>" followed by a newline.
[[nodiscard]] std::string header_line(std::uint64_t seed, std::string_view config);

/// "<stimulus> <response>" per line, each a string of 0/1; `#` starts a comment.
[[nodiscard]] std::vector<std::pair<bit_vector, bit_vector>> parse_pairs(std::string_view text);
[[nodiscard]] bit_vector parse_bits(std::string_view s);

/// Expectation file: "label,cycle,value" rows after a "label,cycle,value" header.
[[nodiscard]] std::string write_expectation(const std::vector<expected_bit>& bits);
[[nodiscard]] std::vector<expected_bit> parse_expectation(std::string_view text);

}  // namespace qcmm::cli

#endif  // QCMM_TOOLS_CLI_HPP
