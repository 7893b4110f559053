#ifndef QCMM_NETLIST_IO_HPP
#define QCMM_NETLIST_IO_HPP

#include "qcmm/layout.hpp"
#include "qcmm/trace.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcmm
{

/// Positioned error raised by every text parser in this header. Lines and columns are 1-based.
class parse_error : public std::runtime_error
{
  public:
    parse_error(std::size_t line, std::size_t column, const std::string& what);

    [[nodiscard]] std::size_t line() const noexcept
    {
        return line_;
    }
    [[nodiscard]] std::size_t column() const noexcept
    {
        return column_;
    }

  private:
    std::size_t line_;
    std::size_t column_;
};

inline constexpr int netlist_format_version = 1;

/**
 * Parses the line-oriented netlist format:
 *
 *     qcn version=1 name=<string> pitch=<float-nm>
 *     cell id=<token> x=<float> y=<float> layer=<uint> zone=<0..3> func=<normal|fixed|input|output> [pol=<-1|1>] [label=<token>]
 *
 * `#` starts a comment. The header is optional (defaults: empty name, 20 nm pitch) but must
 * precede every cell record. The result is not validated; call validate() for layout rules.
 */
[[nodiscard]] layout parse_netlist(std::string_view text);

/// Canonical text: header, then one record per cell sorted by (layer, y, x, id).
/// Throws layout_error if the layout has validation diagnostics.
[[nodiscard]] std::string serialize_netlist(const layout& lyt);

/// Parses "<label>: <bit> <bit> ..." lines; shorter sequences are zero-padded.
[[nodiscard]] waveform_program parse_program(std::string_view text);
[[nodiscard]] std::string serialize_program(const waveform_program& prog);

/// Analog CSV: "t_ps,<label>,..." with 6 significant digits, labels sorted.
[[nodiscard]] std::string write_trace(const trace& tr);
/// Digital CSV: "cycle,<label>,..." with cells in {0,1,X}, labels sorted.
[[nodiscard]] std::string write_trace(const digital_trace& tr);
/// Reads a digital CSV as produced by write_trace; `#` lines are skipped.
[[nodiscard]] digital_trace parse_digital_trace(std::string_view text);

}  // namespace qcmm

#endif  // QCMM_NETLIST_IO_HPP
