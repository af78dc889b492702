#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nlobstacle/error.hpp"
#include "nlobstacle/penalty.hpp"

using namespace nlobs;

TEST_CASE("ramp penalty values")
{
    const PenaltyFn pen(0.1);
    CHECK(pen.theta(-1.0) == 0.0);
    CHECK(pen.theta(0.0) == 0.0);
    CHECK(pen.theta(0.05) == doctest::Approx(0.5));
    CHECK(pen.theta(0.1) == 1.0);
    CHECK(pen.theta(7.0) == 1.0);
    CHECK(pen.slope(0.05) == doctest::Approx(10.0));
    CHECK(pen.C_theta() == 0.25);
}

TEST_CASE("theta is nondecreasing with values in [0, 1]")
{
    for (ThetaVariant v : {ThetaVariant::ramp, ThetaVariant::smoothstep}) {
        const PenaltyFn pen(1e-2, v);
        double last = 0.0;
        for (double t = -0.05; t < 0.05; t += 1e-5) {
            const double th = pen.theta(t);
            CHECK(th >= last);
            CHECK(th >= 0.0);
            CHECK(th <= 1.0);
            last = th;
        }
    }
}

TEST_CASE("C_theta equals the supremum of (1 - theta(t)) t")
{
    for (ThetaVariant v : {ThetaVariant::ramp, ThetaVariant::smoothstep}) {
        double best = 0.0;
        for (int k = 1; k <= 200000; ++k) {
            const double t = k * 1e-5;
            best = std::max(best, (1.0 - PenaltyFn::unit(v, t)) * t);
        }
        CHECK(PenaltyFn::C_theta(v) == doctest::Approx(best).epsilon(1e-8));
    }
}

TEST_CASE("primitive and slope are consistent with theta")
{
    for (ThetaVariant v : {ThetaVariant::ramp, ThetaVariant::smoothstep}) {
        const PenaltyFn pen(0.3, v);
        CHECK(pen.primitive(-2.0) == 0.0);
        for (double t : {-0.1, 0.05, 0.1, 0.2, 0.29, 0.5, 2.0}) {
            const double step = 1e-7;
            const double fd = (pen.primitive(t + step) - pen.primitive(t - step)) / (2.0 * step);
            CHECK(fd == doctest::Approx(pen.theta(t)).epsilon(1e-6).scale(1.0));
            const double fd2 = (pen.theta(t + step) - pen.theta(t - step)) / (2.0 * step);
            CHECK(fd2 == doctest::Approx(pen.slope(t)).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("penalty configuration errors")
{
    CHECK_THROWS_AS(PenaltyFn(0.0), ConfigError);
    CHECK_THROWS_AS(PenaltyFn(-1.0), ConfigError);
    CHECK(parse_theta_variant("smoothstep") == ThetaVariant::smoothstep);
    CHECK(to_string(ThetaVariant::ramp) == "ramp");
    CHECK_THROWS_AS(parse_theta_variant("tanh"), ConfigError);
}
