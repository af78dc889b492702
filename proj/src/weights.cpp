#include "nlobstacle/weights.hpp"

#include <cmath>
#include <sstream>

#include "nlobstacle/error.hpp"
#include "nlobstacle/kernels.hpp"

namespace nlobs {

NearField parse_near_field(std::string_view name)
{
    if (name == "zeta-corrected") {
        return NearField::zeta_corrected;
    }
    if (name == "midpoint") {
        return NearField::midpoint;
    }
    throw ConfigError("operator.near_field: expected zeta-corrected or midpoint, got '" + std::string(name) + "'");
}

std::string_view to_string(NearField mode)
{
    return mode == NearField::midpoint ? "midpoint" : "zeta-corrected";
}

double near_field_factor(NearField mode, double s, double p)
{
    if (mode == NearField::midpoint) {
        return 1.0;
    }
    // Sum_{j>=1} j^{p-1-sp} differs from the integral of z^{p-1-sp} over (0, J) by
    // zeta(1 + sp - p) at leading order; the missing moment goes to the neighbours.
    const double factor = 1.0 - std::riemann_zeta(1.0 + s * p - p);
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        std::ostringstream msg;
        msg << "near-field correction is not positive for s=" << s << ", p=" << p
            << "; use operator.near_field = \"midpoint\"";
        throw ConfigError(msg.str());
    }
    return factor;
}

KernelWeights assemble_weights(GridPtr grid, const FractionalParams& params, NearField near_field)
{
    if (params.is_local()) {
        throw AssemblyError("assemble_weights: s = 1 has no kernel; use the local p-Laplacian");
    }
    KernelWeights w;
    w.grid = grid;
    w.params = params;
    w.near_field = near_field;
    w.near_factor = near_field_factor(near_field, params.s, params.p);
    w.n = grid->interior_count();
    w.k.assign(static_cast<std::size_t>(w.n) * static_cast<std::size_t>(w.n), 0.0);
    w.tails.assign(static_cast<std::size_t>(w.n), 0.0);
    kernels::parallel::assemble(grid->n_cells, grid->h, params.s * params.p, w.near_factor, w.k,
                                w.tails);
    return w;
}

} // namespace nlobs
