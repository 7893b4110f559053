#include "qcmm/netlist_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_set>
#include <vector>

namespace qcmm
{

parse_error::parse_error(std::size_t line, std::size_t column, const std::string& what) :
        std::runtime_error(fmt::format("{}:{}: {}", line, column, what)),
        line_{line},
        column_{column}
{}

namespace
{

struct token
{
    std::string text;
    std::size_t column;  // 1-based
};

bool is_space(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

// Splits one line into whitespace-separated tokens, dropping a trailing `#` comment.
// Double-quoted spans (with \" and \\ escapes) stay inside one token.
std::vector<token> tokenize(std::string_view line, std::size_t line_no)
{
    std::vector<token> out;
    std::size_t i = 0;
    while (i < line.size())
    {
        if (is_space(line[i]))
        {
            ++i;
            continue;
        }
        if (line[i] == '#')
            break;
        token t{{}, i + 1};
        bool quoted = false;
        while (i < line.size() && (quoted || (!is_space(line[i]) && line[i] != '#')))
        {
            const char c = line[i];
            if (c == '"')
            {
                quoted = !quoted;
                t.text.push_back(c);
                ++i;
                continue;
            }
            if (quoted && c == '\\' && i + 1 < line.size())
            {
                t.text.push_back(c);
                t.text.push_back(line[i + 1]);
                i += 2;
                continue;
            }
            t.text.push_back(c);
            ++i;
        }
        if (quoted)
            throw parse_error(line_no, t.column, "unterminated quoted string");
        out.push_back(std::move(t));
    }
    return out;
}

template <typename F>
void for_each_line(std::string_view text, F&& f)
{
    std::size_t line_no = 1;
    std::size_t start   = 0;
    while (start <= text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        f(text.substr(start, end - start), line_no);
        if (end == text.size())
            break;
        start = end + 1;
        ++line_no;
    }
}

std::optional<double> parse_double(std::string_view s)
{
    double v{};
    const auto* first = s.data();
    if (!s.empty() && s.front() == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

std::optional<std::uint64_t> parse_uint(std::string_view s)
{
    std::uint64_t v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

bool valid_token(std::string_view s) noexcept
{
    return !s.empty() && std::none_of(s.begin(), s.end(), [](char c)
                                      { return is_space(c) || c == '=' || c == '#' || c == '"' || c == ','; });
}

std::string unquote(std::string_view v, std::size_t line, std::size_t col)
{
    if (v.empty() || v.front() != '"')
        return std::string{v};
    if (v.size() < 2 || v.back() != '"')
        throw parse_error(line, col, "malformed quoted string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
    {
        if (v[i] == '\\' && i + 2 < v.size())
            ++i;
        out.push_back(v[i]);
    }
    return out;
}

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (const char c : s)
    {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

struct field
{
    std::string value;
    std::size_t column;
};

std::map<std::string, field> key_values(const std::vector<token>& toks, std::size_t line_no)
{
    std::map<std::string, field> kv;
    for (std::size_t i = 1; i < toks.size(); ++i)
    {
        const auto& t  = toks[i];
        const auto pos = t.text.find('=');
        if (pos == std::string::npos || pos == 0)
            throw parse_error(line_no, t.column, "expected key=value, got '" + t.text + "'");
        auto key = t.text.substr(0, pos);
        if (!kv.emplace(key, field{t.text.substr(pos + 1), t.column + pos + 1}).second)
            throw parse_error(line_no, t.column, "duplicate key '" + key + "'");
    }
    return kv;
}

std::string format_number(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

layout parse_netlist(std::string_view text)
{
    layout lyt;
    bool header_seen = false;
    std::unordered_set<std::string> ids;

    for_each_line(text,
                  [&](std::string_view line, std::size_t line_no)
                  {
                      const auto toks = tokenize(line, line_no);
                      if (toks.empty())
                          return;
                      auto kv = key_values(toks, line_no);
                      const auto take = [&](const std::string& key) -> std::optional<field>
                      {
                          const auto it = kv.find(key);
                          if (it == kv.end())
                              return std::nullopt;
                          auto f = it->second;
                          kv.erase(it);
                          return f;
                      };
                      const auto require = [&](const std::string& key) -> field
                      {
                          auto f = take(key);
                          if (!f)
                              throw parse_error(line_no, toks.front().column, "missing key '" + key + "'");
                          return *f;
                      };

                      if (toks.front().text == "qcn")
                      {
                          if (header_seen)
                              throw parse_error(line_no, 1, "duplicate header");
                          if (!lyt.cells.empty())
                              throw parse_error(line_no, 1, "header must precede cell records");
                          header_seen = true;
                          const auto ver = require("version");
                          if (ver.value != std::to_string(netlist_format_version))
                              throw parse_error(line_no, ver.column, "unsupported version '" + ver.value + "'");
                          if (auto n = take("name"))
                              lyt.name = unquote(n->value, line_no, n->column);
                          if (auto p = take("pitch"))
                          {
                              const auto v = parse_double(p->value);
                              if (!v || *v <= 0.0)
                                  throw parse_error(line_no, p->column, "pitch must be a positive number");
                              lyt.pitch = *v;
                          }
                      }
                      else if (toks.front().text == "cell")
                      {
                          cell c;
                          const auto id = require("id");
                          if (!valid_token(id.value))
                              throw parse_error(line_no, id.column, "invalid id");
                          if (!ids.insert(id.value).second)
                              throw parse_error(line_no, id.column, "duplicate id '" + id.value + "'");
                          c.id = id.value;

                          for (const auto* key : {"x", "y"})
                          {
                              const auto f = require(key);
                              const auto v = parse_double(f.value);
                              if (!v)
                                  throw parse_error(line_no, f.column, std::string{"invalid "} + key + " coordinate");
                              (key[0] == 'x' ? c.pos.x : c.pos.y) = *v;
                          }
                          const auto layer = require("layer");
                          const auto lv    = parse_uint(layer.value);
                          if (!lv || *lv > 255)
                              throw parse_error(line_no, layer.column, "invalid layer '" + layer.value + "'");
                          c.pos.layer = static_cast<std::uint32_t>(*lv);

                          const auto zone = require("zone");
                          const auto zv   = parse_uint(zone.value);
                          if (!zv || *zv > 3)
                              throw parse_error(line_no, zone.column, "unknown zone '" + zone.value + "'");
                          c.zone = static_cast<int>(*zv);

                          const auto func = require("func");
                          const auto fv   = parse_cell_function(func.value);
                          if (!fv)
                              throw parse_error(line_no, func.column, "unknown func '" + func.value + "'");
                          c.func = *fv;

                          if (auto pol = take("pol"))
                          {
                              if (c.func != cell_function::fixed)
                                  throw parse_error(line_no, pol->column, "pol is only valid on fixed cells");
                              if (pol->value == "-1")
                                  c.fixed_pol = -1.0;
                              else if (pol->value == "1" || pol->value == "+1")
                                  c.fixed_pol = 1.0;
                              else
                                  throw parse_error(line_no, pol->column, "pol must be -1 or 1");
                          }
                          else if (c.func == cell_function::fixed)
                          {
                              throw parse_error(line_no, func.column, "fixed cell '" + c.id + "' is missing pol");
                          }

                          if (auto lbl = take("label"))
                          {
                              if (!valid_token(lbl->value))
                                  throw parse_error(line_no, lbl->column, "invalid label");
                              c.label = lbl->value;
                          }
                          lyt.cells.push_back(std::move(c));
                      }
                      else
                      {
                          throw parse_error(line_no, toks.front().column,
                                            "unknown record type '" + toks.front().text + "'");
                      }

                      if (!kv.empty())
                      {
                          const auto& [key, f] = *kv.begin();
                          throw parse_error(line_no, f.column - key.size() - 1, "unknown key '" + key + "'");
                      }
                  });
    return lyt;
}

std::string serialize_netlist(const layout& lyt)
{
    if (const auto diags = validate(lyt); !diags.empty())
        throw layout_error("serialize_netlist: invalid layout (" + diags.front().rule + " at '" +
                           diags.front().cell_id + "')");

    std::vector<const cell*> order;
    order.reserve(lyt.cells.size());
    for (const auto& c : lyt.cells)
        order.push_back(&c);
    std::sort(order.begin(), order.end(),
              [](const cell* a, const cell* b) {
                  return std::tie(a->pos.layer, a->pos.y, a->pos.x, a->id) <
                         std::tie(b->pos.layer, b->pos.y, b->pos.x, b->id);
              });

    std::string out = fmt::format("qcn version={} name={} pitch={}\n", netlist_format_version, quote(lyt.name),
                                  format_number(lyt.pitch));
    for (const auto* c : order)
    {
        out += fmt::format("cell id={} x={} y={} layer={} zone={} func={}", c->id, format_number(c->pos.x),
                           format_number(c->pos.y), c->pos.layer, c->zone, to_string(c->func));
        if (c->fixed_pol)
            out += *c->fixed_pol < 0 ? " pol=-1" : " pol=1";
        if (c->label)
            out += " label=" + *c->label;
        out += '\n';
    }
    return out;
}

waveform_program parse_program(std::string_view text)
{
    waveform_program prog;
    std::set<std::string> seen;
    for_each_line(text,
                  [&](std::string_view raw, std::size_t line_no)
                  {
                      auto line = raw.substr(0, std::min(raw.size(), raw.find('#')));
                      const auto first = line.find_first_not_of(" \t\r");
                      if (first == std::string_view::npos)
                          return;
                      const auto colon = line.find(':');
                      if (colon == std::string_view::npos)
                          throw parse_error(line_no, first + 1, "expected '<label>: <bits>'");
                      auto label    = line.substr(first, colon - first);
                      const auto le = label.find_last_not_of(" \t");
                      label         = label.substr(0, le == std::string_view::npos ? 0 : le + 1);
                      if (!valid_token(label) || label.find(':') != std::string_view::npos)
                          throw parse_error(line_no, first + 1, "invalid label");
                      if (!seen.insert(std::string{label}).second)
                          throw parse_error(line_no, first + 1, "duplicate label '" + std::string{label} + "'");

                      std::vector<std::uint8_t> bits;
                      for (const auto& t : tokenize(line.substr(colon + 1), line_no))
                      {
                          if (t.text == "0" || t.text == "1")
                              bits.push_back(static_cast<std::uint8_t>(t.text[0] - '0'));
                          else
                              throw parse_error(line_no, colon + 1 + t.column, "non-bit token '" + t.text + "'");
                      }
                      prog.set(std::string{label}, std::move(bits));
                  });
    return prog;
}

std::string serialize_program(const waveform_program& prog)
{
    std::string out;
    for (const auto& [label, bits] : prog.inputs)
    {
        out += label + ":";
        for (const auto b : bits)
            out += b ? " 1" : " 0";
        out += '\n';
    }
    return out;
}

std::string write_trace(const trace& tr)
{
    std::string out = "t_ps";
    for (const auto& [label, s] : tr.series)
        out += "," + label;
    out += '\n';
    for (std::size_t i = 0; i < tr.times_ps.size(); ++i)
    {
        out += fmt::format("{:.6g}", tr.times_ps[i]);
        for (const auto& [label, s] : tr.series)
        {
            // normalise -0 so that sign-symmetric runs stay byte-comparable
            const double v = s.at(i) == 0.0 ? 0.0 : s.at(i);
            out += fmt::format(",{:.6g}", v);
        }
        out += '\n';
    }
    return out;
}

std::string write_trace(const digital_trace& tr)
{
    std::string out = "cycle";
    for (const auto& [label, s] : tr.bits)
        out += "," + label;
    out += '\n';
    for (std::size_t c = 0; c < tr.cycles; ++c)
    {
        out += std::to_string(c);
        for (const auto& [label, s] : tr.bits)
        {
            out += ',';
            out += to_char(s.at(c));
        }
        out += '\n';
    }
    return out;
}

digital_trace parse_digital_trace(std::string_view text)
{
    digital_trace tr;
    std::vector<std::string> columns;
    bool header = false;
    for_each_line(text,
                  [&](std::string_view line, std::size_t line_no)
                  {
                      if (!line.empty() && line.back() == '\r')
                          line.remove_suffix(1);
                      if (line.empty() || line.front() == '#')
                          return;
                      std::vector<std::string> cells;
                      std::size_t start = 0;
                      while (true)
                      {
                          const auto comma = line.find(',', start);
                          cells.emplace_back(line.substr(start, comma - start));
                          if (comma == std::string_view::npos)
                              break;
                          start = comma + 1;
                      }
                      if (!header)
                      {
                          if (cells.front() != "cycle")
                              throw parse_error(line_no, 1, "digital trace must start with a 'cycle' column");
                          columns.assign(cells.begin() + 1, cells.end());
                          for (const auto& c : columns)
                          {
                              if (!tr.bits.emplace(c, std::vector<logic>{}).second)
                                  throw parse_error(line_no, 1, "duplicate column '" + c + "'");
                          }
                          header = true;
                          return;
                      }
                      if (cells.size() != columns.size() + 1)
                          throw parse_error(line_no, 1, "row width does not match header");
                      const auto cyc = parse_uint(cells.front());
                      if (!cyc || *cyc != tr.cycles)
                          throw parse_error(line_no, 1, "cycle indices must count up from 0");
                      for (std::size_t i = 0; i < columns.size(); ++i)
                      {
                          const auto& v = cells[i + 1];
                          logic bit{};
                          if (v == "0")
                              bit = logic::zero;
                          else if (v == "1")
                              bit = logic::one;
                          else if (v == "X")
                              bit = logic::x;
                          else
                              throw parse_error(line_no, 1, "invalid digital value '" + v + "'");
                          tr.bits[columns[i]].push_back(bit);
                      }
                      ++tr.cycles;
                  });
    if (!header)
        throw parse_error(1, 1, "empty digital trace");
    return tr;
}

}  // namespace qcmm
