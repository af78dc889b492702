#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlobstacle/error.hpp"
#include "nlobstacle/quadrature.hpp"

using namespace nlobs;

namespace {

// Squared Fourier transforms of the bump (1-x^2)_+^2 and the tent (1-|x|)_+.
double bump_hat(double xi)
{
    if (xi < 0.05) {
        const double x2 = xi * xi;
        return 16.0 / 15.0 - 8.0 / 105.0 * x2 + 16.0 / (315.0 * 24.0) * x2 * x2;
    }
    return 16.0 * ((3.0 - xi * xi) * std::sin(xi) - 3.0 * xi * std::cos(xi)) / std::pow(xi, 5);
}

double tent_hat(double xi)
{
    if (xi < 1e-4) {
        return 1.0 - xi * xi / 12.0;
    }
    const double sh = std::sin(0.5 * xi);
    return 4.0 * sh * sh / (xi * xi);
}

// Plancherel: the p = 2 double integral equals
//   (1/2pi) * 2 int_0^inf |u^(xi)|^2 xi^{2s} dxi * 4 int_0^inf (1 - cos w) w^{-1-2s} dw,
// and the last integral is Gamma(2-2s) cos(pi s) / (2s (1-2s)).
double cosine_moment(double s)
{
    if (std::abs(s - 0.5) < 1e-12) {
        return std::numbers::pi / 2.0;
    }
    return std::tgamma(2.0 - 2.0 * s) * std::cos(std::numbers::pi * s) / (2.0 * s * (1.0 - 2.0 * s));
}

template <class Hat>
double fourier_seminorm_sq(Hat&& hat, double s, double tail_power, double tail_mean)
{
    const double L = 2000.0;
    const double panel = std::numbers::pi;
    // adaptive panels: xi^{2s} is not smooth at 0
    double body = 0.0;
    for (double lo = 0.0; lo < L; lo += panel) {
        body += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double xi) {
                const double v = hat(xi);
                return v * v * std::pow(xi, 2.0 * s);
            },
            lo, std::min(L, lo + panel), 15, 1e-13);
    }
    // beyond L, |u^|^2 ~ tail_mean * xi^{-tail_power} on average
    const double tail = tail_mean * std::pow(L, 2.0 * s - tail_power + 1.0) / (tail_power - 1.0 - 2.0 * s);
    const double fourier = (body + tail) * 2.0 / (2.0 * std::numbers::pi);
    return (1.0 - s) * fourier * 4.0 * cosine_moment(s);
}

} // namespace

TEST_CASE("Fourier oracle for the bump at s = 1/2 is 32/9")
{
    const double oracle = fourier_seminorm_sq(bump_hat, 0.5, 6.0, 128.0);
    CHECK(oracle == doctest::Approx(32.0 / 9.0).epsilon(1e-6));
    const double lib = std::pow(seminorm_quadrature(CatalogFn::bump, 0.5, 2.0, 1e-8).value, 2.0);
    CHECK(lib == doctest::Approx(32.0 / 9.0).epsilon(1e-6));
}

TEST_CASE("quadrature matches the Fourier oracle, p = 2")
{
    for (double s : {0.2, 0.35, 0.7, 0.9}) {
        CAPTURE(s);
        const double bump = fourier_seminorm_sq(bump_hat, s, 6.0, 128.0);
        CHECK(std::pow(seminorm_quadrature(CatalogFn::bump, s, 2.0, 1e-8).value, 2.0) ==
              doctest::Approx(bump).epsilon(1e-6));
        // sin^4 averages to 3/8
        const double tent = fourier_seminorm_sq(tent_hat, s, 4.0, 6.0);
        CHECK(std::pow(seminorm_quadrature(CatalogFn::tent, s, 2.0, 1e-8).value, 2.0) ==
              doctest::Approx(tent).epsilon(1e-5));
    }
}

TEST_CASE("closed-form gradient norms")
{
    CHECK(catalog_gradient_power(CatalogFn::bump, 2.0) == doctest::Approx(256.0 / 105.0).epsilon(1e-14));
    // 2 * 64 * int_0^1 x^3 (1-x^2)^3 dx = 128 / 40
    CHECK(catalog_gradient_power(CatalogFn::bump, 3.0) == doctest::Approx(3.2).epsilon(1e-14));
    CHECK(catalog_gradient_power(CatalogFn::tent, 1.5) == 2.0);
    CHECK(catalog_gradient_power(CatalogFn::parab, 2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("BBM limit of the bump and the tent")
{
    const double bump = std::pow(seminorm_quadrature(CatalogFn::bump, 0.999, 2.0, 1e-4).value, 2.0);
    CHECK(std::abs(bump - 256.0 / 105.0) < 0.02 * 256.0 / 105.0);
    const double tent = std::pow(seminorm_quadrature(CatalogFn::tent, 0.999, 2.0, 1e-4).value, 2.0);
    CHECK(std::abs(tent - 2.0) < 0.04);

    double previous = 1e300;
    for (double s : {0.9, 0.99, 0.999}) {
        const double gap = std::abs(std::pow(seminorm_quadrature(CatalogFn::bump, s, 2.0, 1e-6).value, 2.0) -
                                    256.0 / 105.0);
        CHECK(gap <= previous);
        previous = gap;
    }
}

TEST_CASE("quadrature is continuous in s")
{
    const double a = seminorm_quadrature(CatalogFn::bump, 0.5, 2.0, 1e-8).value;
    const double b = seminorm_quadrature(CatalogFn::bump, 0.5001, 2.0, 1e-8).value;
    CHECK(std::abs(a - b) < 1e-2 * a);
}

TEST_CASE("quadrature works for p != 2")
{
    for (double p : {1.5, 3.0}) {
        const QuadratureEstimate e = seminorm_quadrature_estimate(CatalogFn::tent, 0.6, p, 1e-6);
        CHECK(e.seminorm.value > 0.0);
        CHECK(e.estimated_rel_error <= 1e-6);
        CHECK(e.seminorm.order_r == 0.6);
        CHECK(e.seminorm.p == p);
    }
}

TEST_CASE("quadrature input errors")
{
    CHECK_THROWS_AS(seminorm_quadrature(CatalogFn::bump, 0.5, 2.0, 0.0), DomainError);
    CHECK_THROWS_AS(seminorm_quadrature(CatalogFn::bump, 1.0, 2.0, 1e-6), DomainError);
    CHECK_THROWS_AS(seminorm_quadrature("wave", 0.5, 2.0, 1e-6), ConfigError);
    CHECK(parse_catalog_fn("parab") == CatalogFn::parab);
    CHECK(to_string(CatalogFn::tent) == "tent");
    CHECK(catalog_value(CatalogFn::bump, 0.5) == doctest::Approx(0.5625));
    CHECK(catalog_value(CatalogFn::tent, 1.5) == 0.0);
}
