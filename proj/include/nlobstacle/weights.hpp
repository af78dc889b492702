#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "nlobstacle/grid.hpp"

namespace nlobs {

/// Treatment of the omitted singular diagonal cell.
enum class NearField {
    /// Plain point evaluation k_ij = |x_i - x_j|^{-(1+sp)}.
    midpoint,
    /// Nearest-neighbour weights scaled by (1 - zeta(1 + sp - p)), which restores the
    /// |z|^p moment of the kernel lost with the diagonal cell.
    zeta_corrected,
};

/// Accepts "zeta-corrected" and "midpoint"; throws ConfigError otherwise.
NearField parse_near_field(std::string_view name);
std::string_view to_string(NearField mode);

/// Factor applied to k_{i,i+1}; 1 for the midpoint rule.
double near_field_factor(NearField mode, double s, double p);

/// Pair weights and exterior tail integrals for one (grid, s, p).
struct KernelWeights {
    GridPtr grid;
    FractionalParams params;
    NearField near_field = NearField::zeta_corrected;
    double near_factor = 1.0;
    int n = 0;                  ///< interior node count
    std::vector<double> k;      ///< n*n row-major, k_ii = 0
    std::vector<double> tails;  ///< T_i, i over interior nodes

    /// Interior indices are 0-based here: row r is grid node r + 1.
    [[nodiscard]] double weight(int r, int c) const
    {
        return k[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)];
    }
};

/// Throws AssemblyError when params.s == 1 (use the local operator instead).
KernelWeights assemble_weights(GridPtr grid, const FractionalParams& params,
                               NearField near_field = NearField::zeta_corrected);

} // namespace nlobs
