#include "qcmm/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace qcmm
{

std::string_view to_string(cell_function f) noexcept
{
    switch (f)
    {
        case cell_function::normal: return "normal";
        case cell_function::fixed: return "fixed";
        case cell_function::input: return "input";
        case cell_function::output: return "output";
    }
    return "normal";
}

std::optional<cell_function> parse_cell_function(std::string_view s) noexcept
{
    if (s == "normal")
        return cell_function::normal;
    if (s == "fixed")
        return cell_function::fixed;
    if (s == "input")
        return cell_function::input;
    if (s == "output")
        return cell_function::output;
    return std::nullopt;
}

std::optional<std::size_t> layout::find_label(std::string_view lbl, cell_function f) const noexcept
{
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (cells[i].func == f && cells[i].label && *cells[i].label == lbl)
            return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> layout::find_id(std::string_view cid) const noexcept
{
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (cells[i].id == cid)
            return i;
    }
    return std::nullopt;
}

std::vector<std::string> layout::labels(cell_function f) const
{
    std::vector<std::string> out;
    for (const auto& c : cells)
    {
        if (c.func == f && c.label)
            out.push_back(*c.label);
    }
    return out;
}

namespace
{

// Cells are bucketed on a grid of `pitch`-sized bins so the overlap check stays linear.
struct bin_key
{
    std::int64_t bx, by;
    std::uint32_t layer;
    auto operator<=>(const bin_key&) const = default;
};

bin_key bin_of(const position& p, double pitch)
{
    return {static_cast<std::int64_t>(std::floor(p.x / pitch)), static_cast<std::int64_t>(std::floor(p.y / pitch)),
            p.layer};
}

bool too_close(const position& a, const position& b, double pitch)
{
    return a.layer == b.layer && std::hypot(a.x - b.x, a.y - b.y) < 0.5 * pitch;
}

}  // namespace

std::vector<diagnostic> validate(const layout& lyt, const validation_options& opts)
{
    std::vector<diagnostic> out;
    const auto report = [&out](const std::string& id, std::string rule, std::string msg)
    { out.push_back({id, std::move(rule), std::move(msg)}); };

    if (!(std::isfinite(lyt.pitch) && lyt.pitch > 0.0))
        report("", "pitch", "pitch must be a positive finite length");

    std::unordered_set<std::string> ids;
    std::map<std::pair<cell_function, std::string>, std::string> labels_seen;
    std::map<std::string, cell_function> label_class;
    std::size_t inputs = 0, outputs = 0;

    for (const auto& c : lyt.cells)
    {
        if (!ids.insert(c.id).second)
            report(c.id, "duplicate-id", "cell id appears more than once");
        if (!std::isfinite(c.pos.x) || !std::isfinite(c.pos.y))
            report(c.id, "non-finite", "cell coordinates must be finite");
        if (c.pos.layer >= opts.max_layers)
            report(c.id, "layer-range", "layer exceeds the maximum layer count");
        if (c.zone < 0 || c.zone > 3)
            report(c.id, "zone-range", "clock zone must be in 0..3");

        if (c.func == cell_function::fixed)
        {
            if (!c.fixed_pol || (*c.fixed_pol != -1.0 && *c.fixed_pol != 1.0))
                report(c.id, "fixed-pol", "fixed cell needs pol -1 or +1");
        }
        else if (c.fixed_pol)
        {
            report(c.id, "fixed-pol", "only fixed cells carry a polarization");
        }

        const bool labelled_class = c.func == cell_function::input || c.func == cell_function::output;
        if (labelled_class && (!c.label || c.label->empty()))
            report(c.id, "missing-label", "input/output cells need a label");
        if (!labelled_class && c.label)
            report(c.id, "stray-label", "only input/output cells carry a label");

        if (labelled_class && c.label && !c.label->empty())
        {
            if (!labels_seen.emplace(std::pair{c.func, *c.label}, c.id).second)
                report(c.id, "duplicate-label", "label '" + *c.label + "' reused within its class");
            const auto [it, fresh] = label_class.emplace(*c.label, c.func);
            if (!fresh && it->second != c.func)
                report(c.id, "label-collision", "label '" + *c.label + "' used by both an input and an output");
        }
        inputs += c.func == cell_function::input;
        outputs += c.func == cell_function::output;
    }

    if (std::isfinite(lyt.pitch) && lyt.pitch > 0.0)
    {
        std::map<bin_key, std::vector<std::size_t>> bins;
        for (std::size_t i = 0; i < lyt.cells.size(); ++i)
        {
            if (std::isfinite(lyt.cells[i].pos.x) && std::isfinite(lyt.cells[i].pos.y))
                bins[bin_of(lyt.cells[i].pos, lyt.pitch)].push_back(i);
        }
        for (std::size_t i = 0; i < lyt.cells.size(); ++i)
        {
            const auto& p = lyt.cells[i].pos;
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                continue;
            const auto k = bin_of(p, lyt.pitch);
            bool hit = false;
            for (std::int64_t dx = -1; dx <= 1 && !hit; ++dx)
            {
                for (std::int64_t dy = -1; dy <= 1 && !hit; ++dy)
                {
                    const auto it = bins.find({k.bx + dx, k.by + dy, k.layer});
                    if (it == bins.end())
                        continue;
                    for (const auto j : it->second)
                    {
                        if (j < i && too_close(p, lyt.cells[j].pos, lyt.pitch))
                        {
                            report(lyt.cells[i].id, "overlap", "too close to cell '" + lyt.cells[j].id + "'");
                            hit = true;
                            break;
                        }
                    }
                }
            }
        }
    }

    if (inputs == 0)
        report("", "no-inputs", "layout has no input cell");
    if (outputs == 0)
        report("", "no-outputs", "layout has no output cell");
    return out;
}

layout translate(const layout& lyt, const position& offset)
{
    auto out = lyt;
    for (auto& c : out.cells)
        c.pos = c.pos + offset;
    return out;
}

namespace
{

std::string unique_name(const std::string& base, const std::unordered_set<std::string>& taken)
{
    if (!taken.contains(base))
        return base;
    for (std::size_t n = 2;; ++n)
    {
        auto candidate = base + "_" + std::to_string(n);
        if (!taken.contains(candidate))
            return candidate;
    }
}

}  // namespace

layout merge(const layout& a, const layout& b, const position& offset)
{
    layout out = a;
    if (b.empty())
        return out;
    if (out.empty() && out.name.empty())
        out.name = b.name;

    std::map<bin_key, std::vector<std::size_t>> bins;
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        bins[bin_of(a.cells[i].pos, a.pitch)].push_back(i);

    std::unordered_set<std::string> ids;
    std::unordered_set<std::string> in_labels, out_labels;
    for (const auto& c : a.cells)
    {
        ids.insert(c.id);
        if (c.label)
            (c.func == cell_function::input ? in_labels : out_labels).insert(*c.label);
    }

    for (const auto& src : b.cells)
    {
        auto c = src;
        c.pos = c.pos + offset;
        const auto k = bin_of(c.pos, a.pitch);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
        {
            for (std::int64_t dy = -1; dy <= 1; ++dy)
            {
                const auto it = bins.find({k.bx + dx, k.by + dy, k.layer});
                if (it == bins.end())
                    continue;
                for (const auto j : it->second)
                {
                    if (too_close(c.pos, a.cells[j].pos, a.pitch))
                        throw layout_error("merge: cell '" + src.id + "' overlaps '" + a.cells[j].id +
                                           "' after translation");
                }
            }
        }
        c.id = unique_name(c.id, ids);
        ids.insert(c.id);
        if (c.label)
        {
            auto& taken = c.func == cell_function::input ? in_labels : out_labels;
            c.label = unique_name(*c.label, taken);
            taken.insert(*c.label);
        }
        out.cells.push_back(std::move(c));
    }
    return out;
}

double footprint(const layout& lyt)
{
    if (lyt.empty())
        throw layout_error("footprint: empty layout");
    double min_x = lyt.cells.front().pos.x, max_x = min_x;
    double min_y = lyt.cells.front().pos.y, max_y = min_y;
    for (const auto& c : lyt.cells)
    {
        min_x = std::min(min_x, c.pos.x);
        max_x = std::max(max_x, c.pos.x);
        min_y = std::min(min_y, c.pos.y);
        max_y = std::max(max_y, c.pos.y);
    }
    return (max_x - min_x + lyt.pitch) * (max_y - min_y + lyt.pitch);
}

}  // namespace qcmm
