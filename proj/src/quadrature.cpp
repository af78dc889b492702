#include "nlobstacle/quadrature.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "nlobstacle/error.hpp"
#include "nlobstacle/kernels.hpp"

namespace nlobs {

CatalogFn parse_catalog_fn(std::string_view name)
{
    if (name == "bump") {
        return CatalogFn::bump;
    }
    if (name == "tent") {
        return CatalogFn::tent;
    }
    if (name == "parab") {
        return CatalogFn::parab;
    }
    throw ConfigError("unknown catalog function '" + std::string(name) + "' (bump, tent, parab)");
}

std::string_view to_string(CatalogFn fn)
{
    switch (fn) {
    case CatalogFn::bump: return "bump";
    case CatalogFn::tent: return "tent";
    case CatalogFn::parab: return "parab";
    }
    return "?";
}

double catalog_value(CatalogFn fn, double x)
{
    if (!(std::abs(x) < 1.0)) {
        return 0.0;
    }
    switch (fn) {
    case CatalogFn::bump: {
        const double q = 1.0 - x * x;
        return q * q;
    }
    case CatalogFn::tent: return 1.0 - std::abs(x);
    case CatalogFn::parab: return 1.0 - x * x;
    }
    return 0.0;
}

double catalog_slope(CatalogFn fn, double x)
{
    if (x < -1.0 || x >= 1.0) {
        return 0.0;
    }
    switch (fn) {
    case CatalogFn::bump: return -4.0 * x * (1.0 - x * x);
    case CatalogFn::tent: return x < 0.0 ? 1.0 : -1.0;
    case CatalogFn::parab: return -2.0 * x;
    }
    return 0.0;
}

double catalog_gradient_power(CatalogFn fn, double p)
{
    switch (fn) {
    // 2 int_0^1 (4x(1-x^2))^p dx, substitute t = x^2.
    case CatalogFn::bump: return std::pow(4.0, p) * std::beta((p + 1.0) / 2.0, p + 1.0);
    case CatalogFn::tent: return 2.0;
    case CatalogFn::parab: return 2.0 * std::pow(2.0, p) / (p + 1.0);
    }
    return 0.0;
}

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

struct Refinement {
    int graded_panels; // geometric panels toward a singular end, ratio 1/2
    int subdivisions;  // uniform split of each panel
};

Refinement refinement(int level)
{
    return {14 + 6 * level, 1 + level / 2};
}

/// Integral over [lo, hi] with geometric grading toward the chosen ends. The
/// innermost cell next to a graded end is left out and reported via `cut`.
template <class F>
double graded(F&& f, double lo, double hi, bool toward_lo, bool toward_hi, Refinement ref,
              double* cut_lo = nullptr)
{
    if (!(hi > lo)) {
        if (cut_lo != nullptr) {
            *cut_lo = 0.0;
        }
        return 0.0;
    }
    auto uniform = [&](double a, double b) {
        double acc = 0.0;
        const double step = (b - a) / ref.subdivisions;
        for (int k = 0; k < ref.subdivisions; ++k) {
            acc += Rule::integrate(f, a + k * step, a + (k + 1) * step);
        }
        return acc;
    };
    if (toward_lo && toward_hi) {
        const double mid = 0.5 * (lo + hi);
        return graded(f, lo, mid, true, false, ref, cut_lo) + graded(f, mid, hi, false, true, ref);
    }
    const double len = hi - lo;
    double acc = 0.0;
    if (toward_lo) {
        double outer = hi;
        for (int k = 1; k <= ref.graded_panels; ++k) {
            const double inner = lo + len * std::ldexp(1.0, -k);
            acc += uniform(inner, outer);
            outer = inner;
        }
        if (cut_lo != nullptr) {
            *cut_lo = outer - lo;
        } else {
            acc += uniform(lo, outer);
        }
        return acc;
    }
    if (toward_hi) {
        double inner_lo = lo;
        for (int k = 1; k <= ref.graded_panels; ++k) {
            const double next = hi - len * std::ldexp(1.0, -k);
            acc += uniform(inner_lo, next);
            inner_lo = next;
        }
        return acc + uniform(inner_lo, hi);
    }
    return uniform(lo, hi);
}

double seminorm_power(CatalogFn fn, double s, double p, int level)
{
    const PowerLaw pw(p);
    const double sp = s * p;
    const Refinement ref = refinement(level);

    // I(x) = int_0^{1-x} |u(x+z) - u(x)|^p z^{-1-sp} dz.
    auto inner = [&](double x) {
        const double ux = catalog_value(fn, x);
        auto integrand = [&](double z) {
            return pw.abs_pow(catalog_value(fn, x + z) - ux) * std::pow(z, -1.0 - sp);
        };
        const double span = 1.0 - x;
        // For the tent the kink at y = 0 sits at z = -x.
        const double kink = (fn == CatalogFn::tent && x < 0.0) ? -x : span;
        double cut = 0.0;
        double acc = graded(integrand, 0.0, kink, true, kink < span, ref, &cut);
        acc += graded(integrand, kink, span, true, false, ref);
        acc += pw.abs_pow(catalog_slope(fn, x)) * std::pow(cut, p - sp) / (p - sp);
        return acc;
    };
    auto outer = [&](double x) {
        const double tail = (std::pow(1.0 + x, -sp) + std::pow(1.0 - x, -sp)) / sp;
        return 2.0 * inner(x) + 2.0 * pw.abs_pow(catalog_value(fn, x)) * tail;
    };
    const double total = graded(outer, -1.0, 0.0, true, true, ref) + graded(outer, 0.0, 1.0, true, true, ref);
    return (1.0 - s) * (p / 2.0) * total;
}

} // namespace

QuadratureEstimate seminorm_quadrature_estimate(CatalogFn fn, double s, double p, double rel_tol)
{
    if (!(rel_tol > 0.0)) {
        throw DomainError("seminorm_quadrature: rel_tol must be positive");
    }
    if (!(s > 0.0 && s < 1.0) || !(p > 1.0)) {
        throw DomainError("seminorm_quadrature: need 0 < s < 1 and p > 1");
    }
    constexpr int max_level = 6;
    double previous = seminorm_power(fn, s, p, 0);
    for (int level = 1; level <= max_level; ++level) {
        const double current = seminorm_power(fn, s, p, level);
        const double err = std::abs(current - previous) / std::abs(current);
        if (err <= rel_tol) {
            return {{s, p, std::pow(current, 1.0 / p)}, err, level};
        }
        previous = current;
    }
    throw ConvergenceError("seminorm_quadrature: relative tolerance not reached");
}

SeminormValue seminorm_quadrature(CatalogFn fn, double s, double p, double rel_tol)
{
    return seminorm_quadrature_estimate(fn, s, p, rel_tol).seminorm;
}

SeminormValue seminorm_quadrature(std::string_view fn, double s, double p, double rel_tol)
{
    return seminorm_quadrature(parse_catalog_fn(fn), s, p, rel_tol);
}

} // namespace nlobs
