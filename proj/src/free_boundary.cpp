#include "nlobstacle/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "nlobstacle/error.hpp"

namespace nlobs {

double default_tol_u(const GridFunction& u, double solver_tol, double p)
{
    const double relative = std::max(10.0 * std::pow(solver_tol, 1.0 / (p - 1.0)), 1e-6);
    return std::max(relative * u.max_abs(), 1e-10);
}

CoincidenceSet coincidence_set(const GridFunction& u, double tol_u)
{
    return coincidence_set(u, GridFunction(u.grid_ptr()), tol_u);
}

CoincidenceSet coincidence_set(const GridFunction& u, const GridFunction& psi, double tol_u)
{
    if (!(tol_u > 0.0)) {
        throw DomainError("coincidence_set: tol_u must be positive");
    }
    require_same_grid(u, psi, "coincidence_set");
    const Grid& grid = u.grid();
    CoincidenceSet out;
    out.tol_u = tol_u;
    out.chi = GridFunction(u.grid_ptr());
    for (int i = 1; i < grid.n_cells; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (u[k] - psi[k] <= tol_u) {
            out.indices.push_back(i);
            out.chi[k] = 1.0;
        }
    }
    const double half = 0.5 * grid.h;
    for (std::size_t k = 0; k < out.indices.size();) {
        std::size_t end = k;
        while (end + 1 < out.indices.size() && out.indices[end + 1] == out.indices[end] + 1) {
            ++end;
        }
        out.intervals.push_back({grid.x(out.indices[k]) - half, grid.x(out.indices[end]) + half});
        k = end + 1;
    }
    return out;
}

FreeBoundary free_boundary(const CoincidenceSet& coin)
{
    FreeBoundary out;
    const Grid& grid = coin.chi.grid();
    for (int i = 1; i + 1 < grid.n_cells; ++i) {
        if (coin.chi[static_cast<std::size_t>(i)] != coin.chi[static_cast<std::size_t>(i + 1)]) {
            out.points.push_back(0.5 * (grid.x(i) + grid.x(i + 1)));
        }
    }
    return out;
}

QuasiCharacteristic recover_quasi_characteristic(const SolveReport& report, const ProblemSpec& problem,
                                                 double tol_f, double tol_u)
{
    require_same_grid(report.u, problem.f, "recover_quasi_characteristic");
    const Grid& grid = problem.grid();
    QuasiCharacteristic out;
    out.theta = GridFunction(problem.f.grid_ptr());
    out.valid_mask.assign(static_cast<std::size_t>(grid.n_cells) + 1, 0);
    for (int i = 1; i < grid.n_cells; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double f = problem.f[k];
        const double f_minus = std::max(-f, 0.0);
        if (f_minus > tol_f) {
            out.valid_mask[k] = 1;
            out.theta[k] = (std::max(f, 0.0) - report.operator_values[k]) / f_minus;
        } else {
            out.theta[k] = report.u[k] > tol_u ? 1.0 : 0.0;
        }
    }
    return out;
}

namespace {

std::vector<Interval> normalized(std::span<const Interval> parts)
{
    std::vector<Interval> sorted(parts.begin(), parts.end());
    std::sort(sorted.begin(), sorted.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
    std::vector<Interval> merged;
    for (const Interval& iv : sorted) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

double distance_to(double x, const std::vector<Interval>& set)
{
    // First interval whose right end is >= x.
    const auto it = std::lower_bound(set.begin(), set.end(), x,
                                     [](const Interval& iv, double v) { return iv.hi < v; });
    double d = std::numeric_limits<double>::infinity();
    if (it != set.end()) {
        d = std::max(it->lo - x, 0.0);
    }
    if (it != set.begin()) {
        d = std::min(d, x - std::prev(it)->hi);
    }
    return d;
}

// sup_{x in a} dist(x, b): dist(., b) is piecewise linear, so the sup over an
// interval of a sits at its endpoints or at a gap midpoint of b inside it.
double directed(const std::vector<Interval>& a, const std::vector<Interval>& b)
{
    double best = 0.0;
    for (const Interval& iv : a) {
        best = std::max({best, distance_to(iv.lo, b), distance_to(iv.hi, b)});
        for (std::size_t k = 0; k + 1 < b.size(); ++k) {
            const double mid = 0.5 * (b[k].hi + b[k + 1].lo);
            if (iv.contains(mid)) {
                best = std::max(best, distance_to(mid, b));
            }
        }
    }
    return best;
}

} // namespace

double hausdorff_distance(std::span<const Interval> a, std::span<const Interval> b)
{
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    if (a.empty() || b.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    const auto na = normalized(a);
    const auto nb = normalized(b);
    return std::max(directed(na, nb), directed(nb, na));
}

double hausdorff_distance(std::span<const double> a, std::span<const double> b)
{
    std::vector<Interval> ia;
    std::vector<Interval> ib;
    for (double x : a) {
        ia.push_back({x, x});
    }
    for (double x : b) {
        ib.push_back({x, x});
    }
    return hausdorff_distance(ia, ib);
}

std::vector<Interval> clip(std::span<const Interval> parts, const Interval& window)
{
    std::vector<Interval> out;
    for (const Interval& iv : parts) {
        const double lo = std::max(iv.lo, window.lo);
        const double hi = std::min(iv.hi, window.hi);
        if (lo <= hi) {
            out.push_back({lo, hi});
        }
    }
    return out;
}

std::vector<double> clip(std::span<const double> points, const Interval& window)
{
    std::vector<double> out;
    std::copy_if(points.begin(), points.end(), std::back_inserter(out),
                 [&](double x) { return window.contains(x); });
    return out;
}

double lebesgue_distance(const GridFunction& chi_a, const GridFunction& chi_b, std::optional<Interval> window)
{
    require_same_grid(chi_a, chi_b, "lebesgue_distance");
    const Grid& grid = chi_a.grid();
    long count = 0;
    for (int i = 1; i < grid.n_cells; ++i) {
        if (window && !window->contains(grid.x(i))) {
            continue;
        }
        const auto k = static_cast<std::size_t>(i);
        if (chi_a[k] != chi_b[k]) {
            ++count;
        }
    }
    return grid.h * static_cast<double>(count);
}

namespace {

double interpolate(const GridFunction& u, double x)
{
    const Grid& grid = u.grid();
    if (x <= grid.a || x >= grid.b) {
        return 0.0;
    }
    const double t = (x - grid.a) / grid.h;
    const int i = std::min(static_cast<int>(t), grid.n_cells - 1);
    const double w = t - i;
    return (1.0 - w) * u[static_cast<std::size_t>(i)] + w * u[static_cast<std::size_t>(i + 1)];
}

} // namespace

GrowthReport growth_check(const GridFunction& u, const CoincidenceSet& coin, std::span<const double> r_list,
                          double p)
{
    GrowthReport out;
    const Grid& grid = u.grid();
    if (coin.empty() || coin.indices.size() == static_cast<std::size_t>(grid.n_cells - 1)) {
        return out;
    }
    const double order = p / (p - 1.0);
    const FreeBoundary fb = free_boundary(coin);
    for (double z : fb.points) {
        for (double r : r_list) {
            if (!(r > 0.0) || z - r < grid.a || z + r > grid.b) {
                continue;
            }
            double sup = std::max(interpolate(u, z - r), interpolate(u, z + r));
            for (int i = 1; i < grid.n_cells; ++i) {
                if (std::abs(grid.x(i) - z) <= r) {
                    sup = std::max(sup, u[static_cast<std::size_t>(i)]);
                }
            }
            if (sup <= coin.tol_u) {
                sup = 0.0;
            }
            out.samples.push_back({z, r, sup, 0.0});
        }
    }
    if (out.samples.empty()) {
        return out;
    }
    out.C1_hat = std::numeric_limits<double>::infinity();
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    int m = 0;
    for (const GrowthSample& s : out.samples) {
        out.C1_hat = std::min(out.C1_hat, s.sup_ball / std::pow(s.r, order));
        if (s.sup_ball > 0.0) {
            const double x = std::log(s.r);
            const double y = std::log(s.sup_ball);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
    }
    for (GrowthSample& s : out.samples) {
        s.bound = out.C1_hat * std::pow(s.r, order);
    }
    const double denom = m * sxx - sx * sx;
    out.exponent = (m >= 2 && denom > 0.0) ? (m * sxy - sx * sy) / denom
                                           : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double holder_seminorm(const GridFunction& u, double beta, const Interval& window)
{
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw DomainError("holder_seminorm: beta must lie in (0, 1]");
    }
    const Grid& grid = u.grid();
    if (!(window.lo >= grid.a && window.hi <= grid.b && window.lo <= window.hi)) {
        throw DomainError("holder_seminorm: window must lie inside the domain");
    }
    std::vector<int> nodes;
    for (int i = 0; i <= grid.n_cells; ++i) {
        if (window.contains(grid.x(i))) {
            nodes.push_back(i);
        }
    }
    double best = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        const double ua = u[static_cast<std::size_t>(nodes[a])];
        const double xa = grid.x(nodes[a]);
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            const double d = std::abs(ua - u[static_cast<std::size_t>(nodes[b])]);
            best = std::max(best, d / std::pow(grid.x(nodes[b]) - xa, beta));
        }
    }
    return best;
}

double lewy_stampacchia_residual(const EnergyOperator& op, const SolveReport& report, const ProblemSpec& problem)
{
    require_same_grid(report.u, problem.f, "lewy_stampacchia_residual");
    const GridFunction a_psi = problem.has_obstacle() ? op.apply(problem.psi) : GridFunction(op.grid_ptr());
    double r = 0.0;
    for (int i = 1; i < op.grid().n_cells; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double f = problem.f[k];
        const double au = report.operator_values[k];
        r = std::max({r, f - au, au - std::max(f, a_psi[k])});
    }
    return r;
}

} // namespace nlobs
