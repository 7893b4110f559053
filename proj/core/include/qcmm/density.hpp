#ifndef QCMM_DENSITY_HPP
#define QCMM_DENSITY_HPP

namespace qcmm
{

/// Storage density implied by a per-neuron footprint, one stored bit per neuron.
struct density_report
{
    double area_per_neuron_nm2{};
    double neurons_per_cm2{};
    double bytes_per_cm2{};
    double gb_per_cm2{};   // 10^9 bytes
    double gib_per_cm2{};  // 2^30 bytes
};

inline constexpr double nm2_per_cm2 = 1e14;

/// Throws std::invalid_argument unless the area is positive and finite.
[[nodiscard]] density_report density(double area_per_neuron_nm2);

}  // namespace qcmm

#endif  // QCMM_DENSITY_HPP
