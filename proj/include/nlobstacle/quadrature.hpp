#pragma once

#include <string_view>
#include <vector>

#include "nlobstacle/operator.hpp"

namespace nlobs {

/// Closed-form test functions on (-1, 1), extended by zero.
enum class CatalogFn {
    bump,  ///< (1 - x^2)_+^2
    tent,  ///< (1 - |x|)_+
    parab, ///< (1 - x^2)_+
};

/// Accepts "bump", "tent", "parab"; throws ConfigError otherwise.
CatalogFn parse_catalog_fn(std::string_view name);
std::string_view to_string(CatalogFn fn);

double catalog_value(CatalogFn fn, double x);
/// Right derivative on [-1, 1).
double catalog_slope(CatalogFn fn, double x);

/// ||u'||_{L^p}^p in closed form.
double catalog_gradient_power(CatalogFn fn, double p);

struct QuadratureEstimate {
    SeminormValue seminorm;
    double estimated_rel_error = 0.0;
    int level = 0;
};

/**
 * Continuum [u]_{s,p} of a catalog function. The double integral over R x R is
 * split into (-1,1)^2 and the exterior part 2 * int |u|^p * tail(x); the inner
 * variable z = y - x is integrated on panels graded geometrically toward z = 0
 * and the last cell [0, z_min] is taken from the Taylor term |u'(x)|^p z^p.
 *
 * Throws DomainError for rel_tol <= 0 or s outside (0, 1), ConvergenceError if
 * the finest level still misses rel_tol.
 */
QuadratureEstimate seminorm_quadrature_estimate(CatalogFn fn, double s, double p, double rel_tol);

SeminormValue seminorm_quadrature(CatalogFn fn, double s, double p, double rel_tol);
SeminormValue seminorm_quadrature(std::string_view fn, double s, double p, double rel_tol);

} // namespace nlobs
