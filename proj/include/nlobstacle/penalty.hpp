#pragma once

#include <string_view>

namespace nlobs {

enum class ThetaVariant {
    ramp,       ///< clamp(t, 0, 1)
    smoothstep, ///< 3t^2 - 2t^3 on (0, 1)
};

/// Accepts "ramp" and "smoothstep"; throws ConfigError otherwise.
ThetaVariant parse_theta_variant(std::string_view name);
std::string_view to_string(ThetaVariant v);

/**
 * Bounded penalty theta_eps(t) = theta(t / eps) with theta nondecreasing,
 * Lipschitz, zero for t <= 0 and one for t >= 1.
 */
class PenaltyFn {
public:
    /// Throws ConfigError unless eps > 0.
    explicit PenaltyFn(double eps, ThetaVariant variant = ThetaVariant::ramp);

    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] ThetaVariant variant() const { return variant_; }
    /// sup_{t>0} (1 - theta(t)) t.
    [[nodiscard]] double C_theta() const { return C_theta(variant_); }

    [[nodiscard]] double theta(double t) const { return unit(variant_, t / eps_); }
    [[nodiscard]] double slope(double t) const { return unit_slope(variant_, t / eps_) / eps_; }
    /// Antiderivative of theta_eps vanishing for t <= 0.
    [[nodiscard]] double primitive(double t) const { return eps_ * unit_primitive(variant_, t / eps_); }

    static double unit(ThetaVariant v, double t);
    static double unit_slope(ThetaVariant v, double t);
    static double unit_primitive(ThetaVariant v, double t);
    static double C_theta(ThetaVariant v);

private:
    double eps_;
    ThetaVariant variant_;
};

} // namespace nlobs
