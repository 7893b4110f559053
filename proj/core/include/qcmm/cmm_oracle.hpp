#ifndef QCMM_CMM_ORACLE_HPP
#define QCMM_CMM_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qcmm
{

using bit_vector = std::vector<std::uint8_t>;
using int_vector = std::vector<long>;

class dimension_error : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// How integer recall sums are turned back into bits.
struct threshold_strategy
{
    enum class kind : std::uint8_t
    {
        fixed,     // bit j = raw[j] >= theta
        willshaw,  // theta = number of 1s in the probe
        lmax       // the L largest components (all ties with the L-th value included)
    };

    kind type{kind::fixed};
    long param{1};

    [[nodiscard]] static threshold_strategy fixed(long theta) noexcept
    {
        return {kind::fixed, theta};
    }
    [[nodiscard]] static threshold_strategy willshaw(long input_weight) noexcept
    {
        return {kind::willshaw, input_weight};
    }
    [[nodiscard]] static threshold_strategy lmax(long count) noexcept
    {
        return {kind::lmax, count};
    }
};

/// Throws std::invalid_argument for a negative theta, a non-positive Willshaw weight or an L outside 1..size.
[[nodiscard]] bit_vector threshold(const int_vector& raw, const threshold_strategy& strategy);

struct recall_result
{
    int_vector raw;
    bit_vector thresholded;
    /// e_r, present when the probe equals a stored stimulus (first match).
    std::optional<int_vector> noise;
    /// raw − (O_r + e_r); all zeros when the binary memory matches the linear one.
    std::optional<int_vector> residual;
};

/**
 * Binary correlation matrix memory. M has one row per stimulus bit and one column per
 * response bit; training ORs in the outer product and recall premultiplies M by the probe.
 * Values are immutable: train() returns a new memory.
 */
class cmm
{
  public:
    cmm(std::size_t stimulus_bits, std::size_t response_bits);

    [[nodiscard]] cmm train(const bit_vector& stimulus, const bit_vector& response) const;

    /// raw[j] = Σ_i M[i][j] · probe[i]
    [[nodiscard]] int_vector recall(const bit_vector& probe) const;
    /// Recall with thresholding plus noise analysis when the probe is a stored stimulus.
    [[nodiscard]] recall_result analyse(const bit_vector& probe, const threshold_strategy& strategy) const;

    /// e_r = Σ_{j≠r} (I_j · I_r) O_j over the retained pairs.
    [[nodiscard]] int_vector noise_term(std::size_t r) const;
    /// Σ_j (I_j · probe) O_j: recall of the equivalent non-binarized memory.
    [[nodiscard]] int_vector linear_recall(const bit_vector& probe) const;

    [[nodiscard]] std::uint8_t weight(std::size_t i, std::size_t j) const
    {
        return matrix_.at(i * cols_ + j);
    }
    [[nodiscard]] std::size_t rows() const noexcept
    {
        return rows_;
    }
    [[nodiscard]] std::size_t cols() const noexcept
    {
        return cols_;
    }
    [[nodiscard]] std::size_t trained() const noexcept
    {
        return pairs_.size();
    }
    [[nodiscard]] const std::vector<std::pair<bit_vector, bit_vector>>& pairs() const noexcept
    {
        return pairs_;
    }
    [[nodiscard]] const std::vector<std::uint8_t>& matrix() const noexcept
    {
        return matrix_;
    }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::uint8_t> matrix_;
    std::vector<std::pair<bit_vector, bit_vector>> pairs_;
};

}  // namespace qcmm

#endif  // QCMM_CMM_ORACLE_HPP
