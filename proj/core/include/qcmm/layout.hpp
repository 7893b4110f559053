#ifndef QCMM_LAYOUT_HPP
#define QCMM_LAYOUT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcmm
{

/// Default center-to-center cell spacing in nm (QCADesigner: 18 nm cell + 2 nm gap).
inline constexpr double default_pitch = 20.0;
/// Drawn edge length of a cell in nm.
inline constexpr double default_cell_size = 18.0;
/// Main plane plus two crossing planes.
inline constexpr std::uint32_t default_max_layers = 3;

struct position
{
    double x{0.0};  // nm
    double y{0.0};  // nm
    std::uint32_t layer{0};

    friend bool operator==(const position&, const position&) = default;
};

[[nodiscard]] inline position operator+(const position& a, const position& b) noexcept
{
    return {a.x + b.x, a.y + b.y, a.layer + b.layer};
}

enum class cell_function : std::uint8_t
{
    normal,
    fixed,
    input,
    output
};

[[nodiscard]] std::string_view to_string(cell_function f) noexcept;
[[nodiscard]] std::optional<cell_function> parse_cell_function(std::string_view s) noexcept;

struct cell
{
    std::string id;
    position pos;
    int zone{0};
    cell_function func{cell_function::normal};
    /// Present iff func == fixed; either -1.0 or +1.0.
    std::optional<double> fixed_pol;
    /// Present iff func is input or output.
    std::optional<std::string> label;

    friend bool operator==(const cell&, const cell&) = default;
};

struct layout
{
    std::string name;
    double pitch{default_pitch};
    std::vector<cell> cells;

    [[nodiscard]] bool empty() const noexcept
    {
        return cells.empty();
    }
    [[nodiscard]] std::size_t size() const noexcept
    {
        return cells.size();
    }

    /// Index of the cell carrying `label` with function `f`, if any.
    [[nodiscard]] std::optional<std::size_t> find_label(std::string_view label, cell_function f) const noexcept;
    [[nodiscard]] std::optional<std::size_t> find_id(std::string_view id) const noexcept;
    /// Labels of all cells with function `f`, in cell order.
    [[nodiscard]] std::vector<std::string> labels(cell_function f) const;

    friend bool operator==(const layout&, const layout&) = default;
};

/// One violated layout rule.
struct diagnostic
{
    std::string cell_id;  // empty for layout-wide rules
    std::string rule;     // e.g. "overlap", "no-inputs"
    std::string message;

    friend bool operator==(const diagnostic&, const diagnostic&) = default;
};

struct validation_options
{
    std::uint32_t max_layers{default_max_layers};
};

/**
 * Checks every cell and layout invariant. Rules reported:
 * `duplicate-id`, `non-finite`, `layer-range`, `zone-range`, `fixed-pol`, `missing-label`,
 * `stray-label`, `duplicate-label`, `label-collision`, `overlap`, `no-inputs`, `no-outputs`, `pitch`.
 */
[[nodiscard]] std::vector<diagnostic> validate(const layout& lyt, const validation_options& opts = {});

class layout_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Shifts every cell by `offset` (layer offset is added).
[[nodiscard]] layout translate(const layout& lyt, const position& offset);

/**
 * Union of `a` and `b` shifted by `offset`. Ids and labels of `b` that clash with `a` get a
 * numeric suffix (`_2`, `_3`, ...). Throws layout_error if a translated cell of `b` lands
 * within half a pitch of a cell of `a` on the same layer.
 */
[[nodiscard]] layout merge(const layout& a, const layout& b, const position& offset);

/// Bounding-box area in nm², each cell counted as a pitch × pitch square.
[[nodiscard]] double footprint(const layout& lyt);

}  // namespace qcmm

#endif  // QCMM_LAYOUT_HPP
