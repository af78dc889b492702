#include "nlobstacle/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlobstacle/error.hpp"

namespace nlobs {

GridPtr build_grid(double a, double b, int n_cells)
{
    if (!(b > a)) {
        std::ostringstream msg;
        msg << "grid: right endpoint b=" << b << " must exceed left endpoint a=" << a;
        throw ConfigError(msg.str());
    }
    if (n_cells < 4) {
        throw ConfigError("grid: n_cells must be at least 4, got " + std::to_string(n_cells));
    }
    auto grid = std::make_shared<Grid>();
    grid->a = a;
    grid->b = b;
    grid->n_cells = n_cells;
    grid->h = (b - a) / n_cells;
    grid->nodes.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) {
        grid->nodes[static_cast<std::size_t>(i)] = a + i * grid->h;
    }
    grid->nodes.back() = b;
    return grid;
}

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid))
{
    values_.assign(static_cast<std::size_t>(grid_->n_cells) + 1, 0.0);
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != static_cast<std::size_t>(grid_->n_cells) + 1) {
        throw ShapeError("grid function: expected " + std::to_string(grid_->n_cells + 1) +
                         " values, got " + std::to_string(values_.size()));
    }
}

std::span<const double> GridFunction::interior() const
{
    return std::span<const double>(values_).subspan(1, values_.size() - 2);
}

std::span<double> GridFunction::interior()
{
    return std::span<double>(values_).subspan(1, values_.size() - 2);
}

double GridFunction::max_abs() const
{
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

void GridFunction::zero_boundary()
{
    values_.front() = 0.0;
    values_.back() = 0.0;
}

void require_same_grid(const GridFunction& lhs, const GridFunction& rhs, std::string_view what)
{
    if (lhs.empty() || rhs.empty() || !lhs.grid().same_as(rhs.grid())) {
        throw ShapeError(std::string(what) + ": grid functions live on different grids");
    }
}

FractionalParams make_params(double s, double p)
{
    if (!(s > 0.0 && s <= 1.0)) {
        std::ostringstream msg;
        msg << "frac.s must lie in (0, 1], got " << s;
        throw ConfigError(msg.str());
    }
    if (!(p > 1.0) || !std::isfinite(p)) {
        std::ostringstream msg;
        msg << "frac.p must lie in (1, inf), got " << p;
        throw ConfigError(msg.str());
    }
    FractionalParams out;
    out.s = s;
    out.p = p;
    // S^0 = {-1, 1}: the sphere integral of |w|^p equals 2, so C_{1,p} = p/2.
    out.C_1p = p / 2.0;
    out.kappa_s = (s == 1.0) ? 0.0 : (1.0 - s) * out.C_1p / 2.0;
    if (s * p < 1.0) {
        out.p_star = p / (1.0 - s * p);
        out.p_natural = out.p_star / (out.p_star - 1.0);
    } else {
        out.p_star = std::numeric_limits<double>::infinity();
        out.p_natural = 1.0;
    }
    return out;
}

std::pair<GridFunction, GridFunction> pos_neg_split(const GridFunction& f)
{
    GridFunction plus(f.grid_ptr());
    GridFunction minus(f.grid_ptr());
    for (std::size_t i = 0; i < f.size(); ++i) {
        plus[i] = std::max(f[i], 0.0);
        minus[i] = std::max(-f[i], 0.0);
    }
    return {std::move(plus), std::move(minus)};
}

bool ProblemSpec::has_obstacle() const
{
    const auto inner = psi.interior();
    return std::any_of(inner.begin(), inner.end(), [](double v) { return v != 0.0; });
}

namespace {

GridFunction zero_boundary_copy(GridFunction g)
{
    g.zero_boundary();
    return g;
}

void require_window_inside(const Grid& grid, const Interval& omega, std::string_view id)
{
    if (!(omega.lo > grid.a && omega.hi < grid.b && omega.lo < omega.hi)) {
        std::ostringstream msg;
        msg << "problem.catalog " << id << ": nondegeneracy window [" << omega.lo << ", " << omega.hi
            << "] must lie strictly inside the domain (" << grid.a << ", " << grid.b << ")";
        throw ConfigError(msg.str());
    }
}

} // namespace

ProblemSpec catalog_problem(std::string_view catalog_id, GridPtr grid)
{
    ProblemSpec out;
    out.catalog_id = std::string(catalog_id);
    const double mid = 0.5 * (grid->a + grid->b);
    const double quarter = 0.25 * grid->length();
    out.psi = GridFunction(grid);

    if (catalog_id == "CAT-A") {
        out.f = zero_boundary_copy(GridFunction::sample(grid, [](double) { return -1.0; }));
        out.omega = {mid - quarter, mid + quarter};
        out.lambda = 0.0;
    } else if (catalog_id == "CAT-B") {
        out.f = zero_boundary_copy(
            GridFunction::sample(grid, [](double x) { return 8.0 * (0.25 - x * x); }));
        out.omega = {0.65, 0.95};
        out.lambda = 8.0 * (0.65 * 0.65 - 0.25);
    } else if (catalog_id == "CAT-C") {
        out.f = zero_boundary_copy(GridFunction::sample(grid, [](double x) {
            return 10.0 * (std::exp(-50.0 * (x + 0.65) * (x + 0.65)) +
                           std::exp(-50.0 * (x - 0.65) * (x - 0.65))) -
                   2.0;
        }));
        out.omega = {-0.3, 0.3};
        out.lambda = 1.5;
    } else if (catalog_id == "CAT-D") {
        out.f = zero_boundary_copy(GridFunction::sample(grid, [](double) { return -1.0; }));
        out.psi = GridFunction::sample(grid, [](double x) { return 0.1 - x * x; });
        out.omega = {mid - quarter, mid + quarter};
        out.lambda = 0.0;
    } else {
        throw ConfigError("problem.catalog: unknown catalog id '" + std::string(catalog_id) +
                          "' (expected CAT-A, CAT-B, CAT-C or CAT-D)");
    }
    require_window_inside(*grid, out.omega, catalog_id);
    validate_problem(out);
    return out;
}

void validate_problem(const ProblemSpec& problem)
{
    require_same_grid(problem.f, problem.psi, "problem");
    const Grid& grid = problem.grid();
    if (problem.psi[0] > 0.0 || problem.psi[problem.psi.size() - 1] > 0.0) {
        throw ConfigError("problem " + problem.catalog_id +
                          ": obstacle must be <= 0 at the Dirichlet nodes");
    }
    if (problem.lambda < 0.0) {
        throw ConfigError("problem " + problem.catalog_id + ": lambda must be nonnegative");
    }
    if (problem.lambda > 0.0) {
        for (int i = 1; i < grid.n_cells; ++i) {
            if (problem.omega.contains(grid.x(i)) &&
                problem.f[static_cast<std::size_t>(i)] > -problem.lambda) {
                throw ConfigError("problem " + problem.catalog_id +
                                  ": f <= -lambda violated on the nondegeneracy window");
            }
        }
    }
}

ProblemSpec restrict_problem(const ProblemSpec& problem, GridPtr coarse)
{
    const Grid& fine = problem.grid();
    if (coarse->n_cells <= 0 || fine.n_cells % coarse->n_cells != 0) {
        throw ShapeError("restrict_problem: coarse grid does not nest in the fine grid");
    }
    const int ratio = fine.n_cells / coarse->n_cells;
    ProblemSpec out;
    out.catalog_id = problem.catalog_id;
    out.omega = problem.omega;
    out.lambda = problem.lambda;
    out.f = GridFunction(coarse);
    out.psi = GridFunction(coarse);
    for (int i = 0; i <= coarse->n_cells; ++i) {
        out.f[static_cast<std::size_t>(i)] = problem.f[static_cast<std::size_t>(i * ratio)];
        out.psi[static_cast<std::size_t>(i)] = problem.psi[static_cast<std::size_t>(i * ratio)];
    }
    return out;
}

} // namespace nlobs
