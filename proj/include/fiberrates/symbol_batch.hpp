#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fiberrates/constellation.hpp"

namespace fiber {

// Aligned transmitted/received symbol pairs for both polarizations, plus the
// estimated auxiliary-channel noise variance. sigma_sq is the per-quadrature
// variance of the circularly symmetric Gaussian auxiliary channel, i.e. the
// sigma^2 appearing in exp(-|y-x|^2 / (2 sigma^2)).
struct SymbolBatch {
    Constellation constellation;
    // [0] = x polarization, [1] = y polarization
    std::array<std::vector<std::uint32_t>, 2> tx_indices;
    std::array<std::vector<cplx>, 2> rx_symbols;
    std::array<double, 2> sigma_sq{0.0, 0.0};
    // Set when a polarization had sigma^2 below the degeneracy floor.
    std::array<bool, 2> sigma_floored{false, false};
    // LS alignment gains actually applied (recorded for auditability).
    std::array<cplx, 2> align_gain{cplx{1.0, 0.0}, cplx{1.0, 0.0}};

    std::size_t symbols_per_pol() const { return tx_indices[0].size(); }
};

}  // namespace fiber
