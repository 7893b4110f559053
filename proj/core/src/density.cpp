#include "qcmm/density.hpp"

#include <cmath>
#include <stdexcept>

namespace qcmm
{

density_report density(double area_per_neuron_nm2)
{
    if (!std::isfinite(area_per_neuron_nm2) || area_per_neuron_nm2 <= 0.0)
        throw std::invalid_argument("density: area per neuron must be positive");

    density_report r;
    r.area_per_neuron_nm2 = area_per_neuron_nm2;
    r.neurons_per_cm2     = nm2_per_cm2 / area_per_neuron_nm2;
    r.bytes_per_cm2       = r.neurons_per_cm2 / 8.0;
    r.gb_per_cm2          = r.bytes_per_cm2 / 1e9;
    r.gib_per_cm2         = r.bytes_per_cm2 / static_cast<double>(1ull << 30);
    return r;
}

}  // namespace qcmm
