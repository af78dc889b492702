#include "nlobstacle/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "nlobstacle/error.hpp"
#include "nlobstacle/free_boundary.hpp"
#include "nlobstacle/harness.hpp"
#include "nlobstacle/operator.hpp"

namespace nlobs {

namespace {

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double flux(double t, double p)
{
    return t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

struct PineqValue {
    double lhs = 0.0;
    double rhs = 0.0;
};

PineqValue pineq(double a, double b, double p)
{
    PineqValue v;
    v.lhs = (flux(a, p) - flux(b, p)) * (a - b);
    const double d = std::abs(a - b);
    if (p >= 2.0) {
        v.rhs = std::pow(2.0, 2.0 - p) * std::pow(d, p);
    } else {
        const double m = std::abs(a) + std::abs(b);
        v.rhs = m > 0.0 ? (p - 1.0) * d * d / std::pow(m, 2.0 - p) : 0.0;
    }
    return v;
}

// Random element of the solution space: values at interior nodes, zero at the ends.
// Mixes rough noise, smooth modes and a random overall scale.
GridFunction random_function(const GridPtr& grid, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 2);
    const double scale = std::pow(10.0, 2.0 * unit(rng));
    const int k = kind(rng);
    const double freq = 1.0 + 4.0 * std::abs(unit(rng));
    const double phase = unit(rng);
    GridFunction out(grid);
    for (int i = 1; i < grid->n_cells; ++i) {
        const double x = (grid->x(i) - grid->a) / grid->length();
        double v = 0.0;
        switch (k) {
        case 0:
            v = unit(rng);
            break;
        case 1:
            v = std::sin(3.14159265358979323846 * freq * x + phase);
            break;
        default:
            v = std::sin(3.14159265358979323846 * freq * x + phase) + 0.1 * unit(rng);
            break;
        }
        out[static_cast<std::size_t>(i)] = scale * v;
    }
    return out;
}

double pairing(const GridFunction& a, const GridFunction& b)
{
    double sum = 0.0;
    for (int i = 1; i < a.grid().n_cells; ++i) {
        sum += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    }
    return a.grid().h * sum;
}

} // namespace

CheckOutcome check_pineq(double p, std::uint64_t seed, long pairs, double rel_slack)
{
    CheckOutcome out;
    out.name = "pineq";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    long equalities = 0;
    long antipodal_equalities = 0;
    double worst = std::numeric_limits<double>::infinity();
    const auto run_case = [&](double a, double b, bool antipodal) {
        const PineqValue v = pineq(a, b, p);
        const double size = std::max(std::abs(v.lhs), std::abs(v.rhs));
        ++out.cases;
        if (v.lhs < v.rhs - rel_slack * size) {
            if (out.failures++ == 0) {
                out.counterexample =
                    fmt("p=%.17g a=%.17g b=%.17g lhs=%.17g rhs=%.17g", p, a, b, v.lhs, v.rhs);
            }
        }
        if (size > 0.0) {
            worst = std::min(worst, (v.lhs - v.rhs) / size);
            if (std::abs(v.lhs - v.rhs) <= rel_slack * size) {
                ++equalities;
                if (antipodal) {
                    ++antipodal_equalities;
                }
            }
        }
    };
    for (long k = 0; k < pairs; ++k) {
        const double a = unit(rng) * std::pow(10.0, 3.0 * unit(rng));
        const double b = unit(rng) * std::pow(10.0, 3.0 * unit(rng));
        run_case(a, b, false);
    }
    // a = -b is the extremal configuration of the p >= 2 bound.
    for (long k = 0; k < 100; ++k) {
        const double a = unit(rng) * std::pow(10.0, 3.0 * unit(rng));
        run_case(a, -a, true);
    }
    out.lines.push_back(fmt("pineq p=%g cases=%ld failures=%ld min relative gap=%.3e", p, out.cases, out.failures,
                            worst));
    out.lines.push_back(fmt("equality cases (relative gap <= %.0e): %ld total, %ld of 100 at a = -b", rel_slack,
                            equalities, antipodal_equalities));
    return out;
}

CheckOutcome check_coercivity(const CoercivitySetup& setup, std::uint64_t seed)
{
    CheckOutcome out;
    out.name = "coercivity";
    const FractionalParams params = make_params(setup.s, setup.p);
    const auto op = make_operator(setup.grid, params, setup.near_field);
    const double p = setup.p;
    std::mt19937_64 rng(seed);
    long tmono_cases = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (long k = 0; k < setup.pairs; ++k) {
        const GridFunction u = random_function(setup.grid, rng);
        const GridFunction v = random_function(setup.grid, rng);
        GridFunction diff(setup.grid);
        GridFunction diff_plus(setup.grid);
        bool has_plus = false;
        for (std::size_t i = 0; i < u.size(); ++i) {
            diff[i] = u[i] - v[i];
            diff_plus[i] = std::max(diff[i], 0.0);
            has_plus = has_plus || diff_plus[i] > 0.0;
        }
        const GridFunction au = op->apply(u);
        const GridFunction av = op->apply(v);
        GridFunction da(setup.grid);
        for (std::size_t i = 0; i < u.size(); ++i) {
            da[i] = au[i] - av[i];
        }
        const double lhs = pairing(da, diff);
        const double semi = op->energy_norm(diff);
        double rhs = 0.0;
        if (p >= 2.0) {
            rhs = std::pow(2.0, 1.0 - p) * std::pow(semi, p);
        } else {
            const double sum = op->energy_norm(u) + op->energy_norm(v);
            rhs = (p - 1.0) * std::pow(2.0, (p * p - 4.0 * p + 2.0) / p) * semi * semi / std::pow(sum, 2.0 - p);
        }
        ++out.cases;
        const double size = std::max(std::abs(lhs), std::abs(rhs));
        if (size > 0.0) {
            worst = std::min(worst, (lhs - rhs) / size);
        }
        if (lhs < rhs - setup.rel_slack * size) {
            if (out.failures++ == 0) {
                out.counterexample = fmt("coercivity pair %ld: s=%.17g p=%.17g lhs=%.17g rhs=%.17g", k, setup.s, p,
                                         lhs, rhs);
            }
        }
        if (has_plus) {
            ++tmono_cases;
            ++out.cases;
            const double t = pairing(da, diff_plus);
            if (!(t > 0.0)) {
                if (out.failures++ == 0) {
                    out.counterexample =
                        fmt("T-monotonicity pair %ld: s=%.17g p=%.17g <Au-Av,(u-v)+>=%.17g", k, setup.s, p, t);
                }
            }
        }
    }
    out.lines.push_back(fmt("coercivity s=%g p=%g n_cells=%d pairs=%ld failures=%ld min relative margin=%.3e",
                            setup.s, p, setup.grid->n_cells, setup.pairs, out.failures, worst));
    out.lines.push_back(fmt("strict T-monotonicity checked on %ld pairs with (u-v)+ != 0", tmono_cases));
    return out;
}

CheckOutcome check_bbm(CatalogFn fn, double p, std::span<const double> s_list, double rel_tol, double gap_tol)
{
    return check_bbm(bbm_check(fn, p, s_list, rel_tol), rel_tol, gap_tol);
}

CheckOutcome check_bbm(const BbmTable& table, double rel_tol, double gap_tol)
{
    CheckOutcome out;
    out.name = "bbm";
    const CatalogFn fn = table.fn;
    const double p = table.p;
    out.lines.push_back(fmt("bbm %s p=%g: ||u'||_p^p = %.12g", std::string(to_string(fn)).c_str(), p,
                            catalog_gradient_power(fn, p)));
    out.lines.push_back("        s     [u]_{s,p}^p      rel_gap");
    std::vector<double> gaps;
    for (const BbmRow& row : table.rows) {
        ++out.cases;
        out.lines.push_back(fmt("%9.6g  %14.10g  %11.4e%s", row.s, row.quadrature_power, row.rel_gap,
                                row.ok ? "" : "  (quadrature missed rel_tol)"));
        if (!row.ok) {
            if (out.failures++ == 0) {
                out.counterexample = fmt("quadrature did not reach rel_tol=%g at s=%.17g", rel_tol, row.s);
            }
        }
        gaps.push_back(row.rel_gap);
    }
    for (std::size_t k = 1; k < gaps.size(); ++k) {
        ++out.cases;
        if (!(gaps[k] <= gaps[k - 1])) {
            if (out.failures++ == 0) {
                out.counterexample = fmt("gap grew from %.6e (s=%.17g) to %.6e (s=%.17g)", gaps[k - 1],
                                         table.rows[k - 1].s, gaps[k], table.rows[k].s);
            }
        }
    }
    ++out.cases;
    if (!(table.final_gap() <= gap_tol)) {
        if (out.failures++ == 0) {
            out.counterexample = fmt("final relative gap %.6e exceeds %.3g", table.final_gap(), gap_tol);
        }
    }
    return out;
}

CheckOutcome check_lewy_stampacchia(const ProblemCheckSetup& setup)
{
    CheckOutcome out;
    out.name = "lewy-stampacchia";
    const auto op = make_operator(setup.problem.f.grid_ptr(), make_params(setup.s, setup.p), setup.near_field);
    const SolveReport rep = solve_vi(*op, setup.problem, setup.solver);
    const double residual = lewy_stampacchia_residual(*op, rep, setup.problem);
    const double limit = 10.0 * setup.solver.tol;
    out.cases = 2;
    if (!rep.converged) {
        ++out.failures;
        out.counterexample = fmt("solve did not converge: residual %.6e", rep.residual);
    }
    if (!(residual <= limit)) {
        ++out.failures;
        if (out.counterexample.empty()) {
            out.counterexample = fmt("residual %.6e exceeds 10 tol = %.3e", residual, limit);
        }
    }
    out.lines.push_back(fmt("lewy-stampacchia %s s=%g p=%g n_cells=%d residual=%.3e (limit %.1e)",
                            setup.problem.catalog_id.c_str(), setup.s, setup.p, setup.problem.grid().n_cells,
                            residual, limit));
    return out;
}

CheckOutcome check_theta_sandwich(const ProblemCheckSetup& setup)
{
    CheckOutcome out;
    out.name = "theta-sandwich";
    if (setup.problem.has_obstacle()) {
        // theta = (f^+ - A u) / f^- describes the zero obstacle only; with psi != 0 the
        // contact set carries A psi, which can push theta outside [0, 1].
        throw ConfigError("check theta-sandwich: needs a zero obstacle (CAT-A, CAT-B or CAT-C)");
    }
    const auto op = make_operator(setup.problem.f.grid_ptr(), make_params(setup.s, setup.p), setup.near_field);
    const SolveReport rep = solve_vi(*op, setup.problem, setup.solver);
    const double tol_u = setup.tol_u > 0.0 ? setup.tol_u : default_tol_u(rep.u, setup.solver.tol, setup.p);
    const QuasiCharacteristic qc = recover_quasi_characteristic(rep, setup.problem, setup.tol_f, tol_u);
    const double slack = 1e3 * setup.solver.tol;
    ++out.cases;
    if (!rep.converged) {
        ++out.failures;
        out.counterexample = fmt("solve did not converge: residual %.6e", rep.residual);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double lo_positive = std::numeric_limits<double>::infinity();
    const Grid& grid = setup.problem.grid();
    for (int i = 1; i < grid.n_cells; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!qc.valid_mask[k]) {
            continue;
        }
        const double t = qc.theta[k];
        const bool positive = rep.u[k] - setup.problem.psi[k] > tol_u;
        ++out.cases;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
        if (positive) {
            lo_positive = std::min(lo_positive, t);
        }
        const bool ok = t >= -slack && t <= 1.0 + slack && (!positive || t >= 1.0 - slack);
        if (!ok && out.failures++ == 0) {
            out.counterexample = fmt("node %d x=%.17g theta=%.17g u=%.17g", i, grid.x(i), t, rep.u[k]);
        }
    }
    out.lines.push_back(fmt("theta-sandwich %s s=%g p=%g valid nodes=%ld min=%.3e max-1=%.3e min on {u>tol_u}-1=%.3e",
                            setup.problem.catalog_id.c_str(), setup.s, setup.p, out.cases - 1, lo, hi - 1.0,
                            lo_positive - 1.0));
    return out;
}

} // namespace nlobs
