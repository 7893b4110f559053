#include "qcmm/cmm_oracle.hpp"

#include <algorithm>
#include <string>

namespace qcmm
{

namespace
{

void check_bits(const bit_vector& v, std::size_t expected, const char* what)
{
    if (v.size() != expected)
        throw dimension_error(std::string{what} + ": expected " + std::to_string(expected) + " bits, got " +
                              std::to_string(v.size()));
    for (const auto b : v)
    {
        if (b > 1)
            throw std::invalid_argument(std::string{what} + ": entries must be 0 or 1");
    }
}

long dot(const bit_vector& a, const bit_vector& b)
{
    long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] & b[i];
    return s;
}

}  // namespace

bit_vector threshold(const int_vector& raw, const threshold_strategy& strategy)
{
    bit_vector out(raw.size(), 0);
    long theta = 0;
    switch (strategy.type)
    {
        case threshold_strategy::kind::fixed:
            if (strategy.param < 0)
                throw std::invalid_argument("threshold: fixed theta must be non-negative");
            theta = strategy.param;
            break;
        case threshold_strategy::kind::willshaw:
            if (strategy.param < 1)
                throw std::invalid_argument("threshold: willshaw input weight must be positive");
            theta = strategy.param;
            break;
        case threshold_strategy::kind::lmax:
        {
            if (strategy.param < 1 || static_cast<std::size_t>(strategy.param) > raw.size())
                throw std::invalid_argument("threshold: L must lie in 1..size");
            auto sorted = raw;
            std::sort(sorted.begin(), sorted.end(), std::greater<>{});
            theta = sorted[static_cast<std::size_t>(strategy.param - 1)];
            break;
        }
    }
    for (std::size_t j = 0; j < raw.size(); ++j)
        out[j] = raw[j] >= theta ? 1 : 0;
    return out;
}

cmm::cmm(std::size_t stimulus_bits, std::size_t response_bits) :
        rows_{stimulus_bits},
        cols_{response_bits},
        matrix_(stimulus_bits * response_bits, 0)
{
    if (rows_ == 0 || cols_ == 0)
        throw dimension_error("cmm: dimensions must be positive");
}

cmm cmm::train(const bit_vector& stimulus, const bit_vector& response) const
{
    check_bits(stimulus, rows_, "train stimulus");
    check_bits(response, cols_, "train response");
    auto next = *this;
    for (std::size_t i = 0; i < rows_; ++i)
    {
        if (!stimulus[i])
            continue;
        for (std::size_t j = 0; j < cols_; ++j)
            next.matrix_[i * cols_ + j] |= response[j];
    }
    next.pairs_.emplace_back(stimulus, response);
    return next;
}

int_vector cmm::recall(const bit_vector& probe) const
{
    check_bits(probe, rows_, "recall probe");
    int_vector raw(cols_, 0);
    for (std::size_t i = 0; i < rows_; ++i)
    {
        if (!probe[i])
            continue;
        for (std::size_t j = 0; j < cols_; ++j)
            raw[j] += matrix_[i * cols_ + j];
    }
    return raw;
}

int_vector cmm::noise_term(std::size_t r) const
{
    if (r >= pairs_.size())
        throw std::out_of_range("noise_term: pair index out of range");
    int_vector e(cols_, 0);
    const auto& probe = pairs_[r].first;
    for (std::size_t p = 0; p < pairs_.size(); ++p)
    {
        if (p == r)
            continue;
        const auto overlap = dot(pairs_[p].first, probe);
        for (std::size_t j = 0; j < cols_; ++j)
            e[j] += overlap * pairs_[p].second[j];
    }
    return e;
}

int_vector cmm::linear_recall(const bit_vector& probe) const
{
    check_bits(probe, rows_, "linear recall probe");
    int_vector out(cols_, 0);
    for (const auto& [stim, resp] : pairs_)
    {
        const auto overlap = dot(stim, probe);
        for (std::size_t j = 0; j < cols_; ++j)
            out[j] += overlap * resp[j];
    }
    return out;
}

recall_result cmm::analyse(const bit_vector& probe, const threshold_strategy& strategy) const
{
    recall_result res;
    res.raw         = recall(probe);
    res.thresholded = threshold(res.raw, strategy);
    const auto it   = std::find_if(pairs_.begin(), pairs_.end(), [&](const auto& p) { return p.first == probe; });
    if (it != pairs_.end())
    {
        const auto r      = static_cast<std::size_t>(it - pairs_.begin());
        res.noise         = noise_term(r);
        const auto weight = dot(probe, probe);
        int_vector residual(cols_, 0);
        for (std::size_t j = 0; j < cols_; ++j)
            residual[j] = res.raw[j] - (weight * it->second[j] + (*res.noise)[j]);
        res.residual = std::move(residual);
    }
    return res;
}

}  // namespace qcmm
