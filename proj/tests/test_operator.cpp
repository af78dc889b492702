#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "nlobstacle/error.hpp"
#include "nlobstacle/kernels.hpp"
#include "nlobstacle/operator.hpp"
#include "nlobstacle/quadrature.hpp"
#include "nlobstacle/weights.hpp"

using namespace nlobs;

namespace {

GridFunction random_element(const GridPtr& g, std::mt19937_64& rng, double scale = 1.0)
{
    std::uniform_real_distribution<double> d(-scale, scale);
    GridFunction u(g);
    for (int i = 1; i < g->n_cells; ++i) {
        u[static_cast<std::size_t>(i)] = d(rng);
    }
    return u;
}

double dot_h(const Grid& g, const GridFunction& a, const GridFunction& b)
{
    double acc = 0.0;
    for (int i = 1; i < g.n_cells; ++i) {
        acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    }
    return g.h * acc;
}

GridFunction axpy(const GridFunction& u, double t, const GridFunction& v)
{
    GridFunction out = u;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += t * v[i];
    }
    return out;
}

// Central difference of the energy along v.
template <class Energy>
double directional(Energy&& e, const GridFunction& u, const GridFunction& v, double step = 1e-6)
{
    return (e(axpy(u, step, v)) - e(axpy(u, -step, v))) / (2.0 * step);
}

} // namespace

TEST_CASE("midpoint weights on the four-cell grid")
{
    const GridPtr g = build_grid(-1.0, 1.0, 4);
    const KernelWeights w = assemble_weights(g, make_params(0.5, 2.0), NearField::midpoint);
    REQUIRE(w.n == 3);
    CHECK(w.weight(0, 1) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(w.weight(0, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.weight(1, 1) == 0.0);
    CHECK(w.tails[1] == doctest::Approx(2.0 / 0.75).epsilon(1e-15));
}

TEST_CASE("weights are symmetric and tails reflect")
{
    const GridPtr g = build_grid(-1.0, 1.0, 40);
    const KernelWeights w = assemble_weights(g, make_params(0.7, 3.0));
    for (int i = 0; i < w.n; ++i) {
        CHECK(w.tails[static_cast<std::size_t>(i)] > 0.0);
        CHECK(w.tails[static_cast<std::size_t>(i)] ==
              doctest::Approx(w.tails[static_cast<std::size_t>(w.n - 1 - i)]).epsilon(1e-14));
        for (int j = 0; j < w.n; ++j) {
            CHECK(w.weight(i, j) == w.weight(j, i));
            CHECK(w.weight(i, j) >= 0.0);
        }
    }
    CHECK_THROWS_AS(assemble_weights(g, make_params(1.0, 2.0)), AssemblyError);
}

TEST_CASE("near-field factor")
{
    CHECK(near_field_factor(NearField::midpoint, 0.5, 2.0) == 1.0);
    // 1 - zeta(1 + sp - p) at s = 0.5, p = 2 is 1 - zeta(0) = 1.5
    CHECK(near_field_factor(NearField::zeta_corrected, 0.5, 2.0) == doctest::Approx(1.5));
    CHECK(parse_near_field("midpoint") == NearField::midpoint);
    CHECK(to_string(NearField::zeta_corrected) == "zeta-corrected");
    CHECK_THROWS_AS(parse_near_field("exact"), ConfigError);
}

TEST_CASE("tails match adaptive integration of the exterior kernel")
{
    const double s = 0.8;
    const double p = 3.0;
    const double sp = s * p;
    const GridPtr g = build_grid(-1.0, 1.0, 256);
    const KernelWeights w = assemble_weights(g, make_params(s, p));
    const double lo = g->a + 0.5 * g->h;
    const double hi = g->b - 0.5 * g->h;
    boost::math::quadrature::exp_sinh<double> integrator;
    double worst = 0.0;
    for (int i = 1; i < g->n_cells; ++i) {
        const double x = g->x(i);
        // integral over (-inf, lo) and (hi, inf), each as a half-line in r = distance
        auto kernel_from = [sp](double d) {
            return [sp, d](double r) { return std::pow(d + r, -(1.0 + sp)); };
        };
        const double oracle = integrator.integrate(kernel_from(x - lo)) + integrator.integrate(kernel_from(hi - x));
        const double rel = std::abs(w.tails[static_cast<std::size_t>(i - 1)] - oracle) / oracle;
        worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("serial and parallel kernels agree")
{
    std::mt19937_64 rng(7);
    for (double p : {1.5, 2.0, 2.5, 3.0}) {
        const GridPtr g = build_grid(-1.0, 1.0, 96);
        const auto params = make_params(0.6, p);
        const double nf = near_field_factor(NearField::zeta_corrected, 0.6, p);
        const int n = g->interior_count();
        std::vector<double> ks(static_cast<std::size_t>(n * n)), kp(ks.size());
        std::vector<double> ts(static_cast<std::size_t>(n)), tp(ts.size());
        kernels::serial::assemble(g->n_cells, g->h, 0.6 * p, nf, ks, ts);
        kernels::parallel::assemble(g->n_cells, g->h, 0.6 * p, nf, kp, tp);
        CHECK(ks == kp);
        CHECK(ts == tp);

        const NonlocalOperator op(assemble_weights(g, params));
        const kernels::PairView view = op.view();
        const PowerLaw pw(p);
        const GridFunction u = random_element(g, rng);
        std::vector<double> a(static_cast<std::size_t>(n)), b(a.size());
        kernels::serial::apply(view, pw, u.interior(), a);
        kernels::parallel::apply(view, pw, u.interior(), b);
        for (int i = 0; i < n; ++i) {
            CHECK(b[static_cast<std::size_t>(i)] ==
                  doctest::Approx(a[static_cast<std::size_t>(i)]).epsilon(1e-12).scale(1.0));
        }
        CHECK(kernels::parallel::pair_sum(view, pw, u.interior()) ==
              doctest::Approx(kernels::serial::pair_sum(view, pw, u.interior())).epsilon(1e-12));

        std::vector<double> hs(static_cast<std::size_t>(n * n)), hp(hs.size());
        kernels::serial::hessian(view, pw, u.interior(), 1e-12, hs);
        kernels::parallel::hessian(view, pw, u.interior(), 1e-12, hp);
        for (std::size_t k = 0; k < hs.size(); ++k) {
            CHECK(hp[k] == doctest::Approx(hs[k]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("apply is odd and vanishes at zero")
{
    std::mt19937_64 rng(11);
    const GridPtr g = build_grid(-1.0, 1.0, 64);
    const KernelWeights w = assemble_weights(g, make_params(0.4, 3.0));
    const GridFunction zero(g);
    const GridFunction z = apply_operator(w, zero);
    CHECK(z.max_abs() == 0.0);
    CHECK(energy(w, zero) == 0.0);

    const GridFunction u = random_element(g, rng);
    GridFunction minus_u = axpy(zero, -1.0, u);
    const GridFunction a = apply_operator(w, u);
    const GridFunction b = apply_operator(w, minus_u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i] == -a[i]);
    }
    CHECK(energy(w, u) == doctest::Approx(energy(w, minus_u)).epsilon(1e-14));

    const GridFunction other(build_grid(-1.0, 1.0, 32));
    CHECK_THROWS_AS(apply_operator(w, other), ShapeError);
}

TEST_CASE("operator is the energy gradient on the tent")
{
    const GridPtr g = build_grid(-1.0, 1.0, 128);
    const KernelWeights w = assemble_weights(g, make_params(0.5, 2.0));
    const GridFunction u = GridFunction::sample(g, [](double x) { return std::max(0.0, 1.0 - 2.0 * std::abs(x)); });
    const GridFunction au = apply_operator(w, u);
    double worst = 0.0;
    for (int i = 1; i < g->n_cells; ++i) {
        GridFunction e(g);
        e[static_cast<std::size_t>(i)] = 1.0;
        // p = 2: the energy is quadratic, so a large step is exact up to rounding
        const double fd = directional([&](const GridFunction& v) { return energy(w, v); }, u, e, 1e-3) / g->h;
        worst = std::max(worst, std::abs(fd - au[static_cast<std::size_t>(i)]) /
                                    std::max(1.0, std::abs(au[static_cast<std::size_t>(i)])));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("directional derivative of the energy, s = 0.3, p = 4")
{
    std::mt19937_64 rng(3);
    const GridPtr g = build_grid(-1.0, 1.0, 64);
    const KernelWeights w = assemble_weights(g, make_params(0.3, 4.0));
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction u = random_element(g, rng);
        const GridFunction v = random_element(g, rng);
        const double fd = directional([&](const GridFunction& x) { return energy(w, x); }, u, v);
        const double exact = dot_h(*g, apply_operator(w, u), v);
        CHECK(std::abs(fd - exact) <= 1e-5 * std::abs(exact));
    }
}

TEST_CASE("energy is the seminorm to the p over p")
{
    std::mt19937_64 rng(5);
    const GridPtr g = build_grid(-1.0, 1.0, 48);
    const KernelWeights w = assemble_weights(g, make_params(0.6, 2.5));
    const GridFunction u = random_element(g, rng);
    const SeminormValue sv = gagliardo_seminorm(w, u);
    CHECK(sv.order_r == 0.6);
    CHECK(std::pow(sv.value, 2.5) / 2.5 == doctest::Approx(energy(w, u)).epsilon(1e-13));

    const auto op = make_operator(g, make_params(0.6, 2.5));
    CHECK(op->energy_norm(u) == doctest::Approx(sv.value).epsilon(1e-13));
}

TEST_CASE("local p-Laplacian")
{
    const GridPtr g = build_grid(-1.0, 1.0, 50);
    const GridFunction zero(g);
    CHECK(local_p_laplacian(*g, 3.0, zero).max_abs() == 0.0);

    const GridFunction q = GridFunction::sample(g, [](double x) { return x * x - 1.0; });
    const GridFunction lq = local_p_laplacian(*g, 2.0, q);
    for (int i = 1; i < g->n_cells; ++i) {
        CHECK(lq[static_cast<std::size_t>(i)] == doctest::Approx(-2.0).epsilon(1e-9));
    }

    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        const GridFunction u = random_element(g, rng);
        const GridFunction v = random_element(g, rng);
        const double fd = directional([&](const GridFunction& x) { return local_energy(*g, 3.0, x); }, u, v);
        const double exact = dot_h(*g, local_p_laplacian(*g, 3.0, u), v);
        CHECK(std::abs(fd - exact) <= 1e-5 * std::abs(exact));
    }
}

TEST_CASE("local operator class matches the free functions")
{
    std::mt19937_64 rng(17);
    const GridPtr g = build_grid(-1.0, 1.0, 32);
    const auto op = make_operator(g, make_params(1.0, 3.0));
    const GridFunction u = random_element(g, rng);
    const GridFunction a = op->apply(u);
    const GridFunction b = local_p_laplacian(*g, 3.0, u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
    }
    CHECK(op->energy(u) == doctest::Approx(local_energy(*g, 3.0, u)).epsilon(1e-13));
    CHECK(op->energy_norm(u) == doctest::Approx(gradient_norm(*g, 3.0, u)).epsilon(1e-13));
}

TEST_CASE("row values agree with apply")
{
    std::mt19937_64 rng(19);
    const GridPtr g = build_grid(-1.0, 1.0, 32);
    for (double s : {0.5, 1.0}) {
        const auto op = make_operator(g, make_params(s, 3.0));
        const GridFunction u = random_element(g, rng);
        const GridFunction au = op->apply(u);
        for (int r = 0; r < op->interior_count(); ++r) {
            const RowValue rv = op->row(r, u.interior()[static_cast<std::size_t>(r)], u.interior());
            CHECK(rv.value == doctest::Approx(au[static_cast<std::size_t>(r + 1)]).epsilon(1e-12));
            CHECK(rv.slope > 0.0);
        }
    }
}

TEST_CASE("Gagliardo seminorm of order r")
{
    const GridPtr g = build_grid(-1.0, 1.0, 64);
    std::mt19937_64 rng(23);
    const GridFunction v = random_element(g, rng);
    const GridFunction zero(g);
    CHECK(gagliardo_seminorm(g, 0.4, 2.0, zero).value == 0.0);
    CHECK(gagliardo_seminorm(g, 0.4, 2.0, v).value > 0.0);

    // r = 0 is the discrete L^p norm
    double lp = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        lp += g->h * std::pow(std::abs(v[i]), 3.0);
    }
    CHECK(gagliardo_seminorm(g, 0.0, 3.0, v).value == doctest::Approx(std::cbrt(lp)).epsilon(1e-14));

    const GridFunction v2 = axpy(zero, 2.0, v);
    for (double r : {0.0, 0.3, 0.8}) {
        CHECK(gagliardo_seminorm(g, r, 2.5, v2).value ==
              doctest::Approx(2.0 * gagliardo_seminorm(g, r, 2.5, v).value).epsilon(1e-13));
    }
    CHECK_THROWS_AS(gagliardo_seminorm(g, 1.0, 2.0, v), DomainError);
    CHECK_THROWS_AS(gagliardo_seminorm(g, 1.2, 2.0, v), DomainError);
}

TEST_CASE("discrete seminorm approximates the continuum value")
{
    const GridPtr g = build_grid(-1.0, 1.0, 512);
    const GridFunction v = GridFunction::sample(g, [](double x) { return 1.0 - x * x; });
    const double discrete = std::pow(gagliardo_seminorm(g, 0.4, 2.0, v).value, 2.0);
    const double continuum = std::pow(seminorm_quadrature(CatalogFn::parab, 0.4, 2.0, 1e-8).value, 2.0);
    CHECK(std::abs(discrete - continuum) < 2e-2 * continuum);
}

TEST_CASE("discrete seminorm is continuous in s")
{
    std::mt19937_64 rng(29);
    const GridPtr g = build_grid(-1.0, 1.0, 128);
    const GridFunction v = random_element(g, rng);
    for (double s : {0.2, 0.5, 0.9}) {
        const double a = gagliardo_seminorm(g, s, 2.0, v).value;
        const double b = gagliardo_seminorm(g, s + 1e-6, 2.0, v).value;
        CHECK(std::abs(a - b) < 1e-4 * a);
    }
}

TEST_CASE("gradient consistency holds on random grids")
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> cells(8, 256);
    std::uniform_real_distribution<double> sdist(0.1, 0.95);
    const double ps[] = {1.5, 2.0, 3.0, 4.0};
    for (int trial = 0; trial < 12; ++trial) {
        const GridPtr g = build_grid(-1.0, 1.0, cells(rng));
        const double p = ps[trial % 4];
        const auto op = make_operator(g, make_params(sdist(rng), p));
        const GridFunction u = random_element(g, rng);
        const GridFunction v = random_element(g, rng);
        const double fd = directional([&](const GridFunction& x) { return op->energy(x); }, u, v);
        const double exact = dot_h(*g, op->apply(u), v);
        CHECK(std::abs(fd - exact) <= 1e-5 * (1.0 + std::abs(op->energy(u))));
    }
}
