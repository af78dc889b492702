#include "nlobstacle/penalty.hpp"

#include <cmath>
#include <string>

#include "nlobstacle/error.hpp"

namespace nlobs {

ThetaVariant parse_theta_variant(std::string_view name)
{
    if (name == "ramp") {
        return ThetaVariant::ramp;
    }
    if (name == "smoothstep") {
        return ThetaVariant::smoothstep;
    }
    throw ConfigError("solver.theta_variant: unknown variant '" + std::string(name) +
                      "' (ramp, smoothstep)");
}

std::string_view to_string(ThetaVariant v)
{
    return v == ThetaVariant::ramp ? "ramp" : "smoothstep";
}

PenaltyFn::PenaltyFn(double eps, ThetaVariant variant) : eps_(eps), variant_(variant)
{
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw ConfigError("penalty.eps must be a positive number");
    }
}

double PenaltyFn::unit(ThetaVariant v, double t)
{
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= 1.0) {
        return 1.0;
    }
    return v == ThetaVariant::ramp ? t : t * t * (3.0 - 2.0 * t);
}

double PenaltyFn::unit_slope(ThetaVariant v, double t)
{
    if (t <= 0.0 || t >= 1.0) {
        return 0.0;
    }
    return v == ThetaVariant::ramp ? 1.0 : 6.0 * t * (1.0 - t);
}

double PenaltyFn::unit_primitive(ThetaVariant v, double t)
{
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= 1.0) {
        return t - 0.5;
    }
    return v == ThetaVariant::ramp ? 0.5 * t * t : t * t * t * (1.0 - 0.5 * t);
}

double PenaltyFn::C_theta(ThetaVariant v)
{
    if (v == ThetaVariant::ramp) {
        return 0.25;
    }
    // (1 - 3t^2 + 2t^3) t is maximal where 1 - 9t^2 + 8t^3 = (t - 1)(8t^2 - t - 1) = 0.
    const double t = (1.0 + std::sqrt(33.0)) / 16.0;
    return (1.0 - unit(v, t)) * t;
}

} // namespace nlobs
