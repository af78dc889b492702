#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlobs {

/**
 * Uniform grid on [a, b] with nodes x_i = a + i*h, i = 0..n_cells.
 *
 * Nodes 0 and n_cells are Dirichlet nodes; grid functions in the solution
 * space vanish there and are extended by zero to the whole line.
 */
struct Grid {
    double a = 0.0;
    double b = 0.0;
    int n_cells = 0;
    double h = 0.0;
    std::vector<double> nodes;

    [[nodiscard]] int interior_count() const { return n_cells - 1; }
    [[nodiscard]] double x(int i) const { return nodes[static_cast<std::size_t>(i)]; }
    [[nodiscard]] double length() const { return b - a; }
    [[nodiscard]] bool same_as(const Grid& other) const
    {
        return a == other.a && b == other.b && n_cells == other.n_cells;
    }
};

using GridPtr = std::shared_ptr<const Grid>;

/// Throws ConfigError when b <= a or n_cells < 4.
GridPtr build_grid(double a, double b, int n_cells);

/// Nodal values on a grid, values.size() == n_cells + 1.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridPtr grid);
    GridFunction(GridPtr grid, std::vector<double> values);

    template <class F>
    static GridFunction sample(GridPtr grid, F&& fn)
    {
        GridFunction out(grid);
        for (int i = 0; i <= grid->n_cells; ++i) {
            out.values_[static_cast<std::size_t>(i)] = fn(grid->x(i));
        }
        return out;
    }

    [[nodiscard]] const Grid& grid() const { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const { return grid_; }
    [[nodiscard]] bool empty() const { return grid_ == nullptr; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] const std::vector<double>& vector() const { return values_; }

    /// Interior values, indices 1..n_cells-1.
    [[nodiscard]] std::span<const double> interior() const;
    [[nodiscard]] std::span<double> interior();

    [[nodiscard]] double max_abs() const;
    void zero_boundary();

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Throws ShapeError unless both functions live on the same grid.
void require_same_grid(const GridFunction& lhs, const GridFunction& rhs, std::string_view what);

struct FractionalParams {
    double s = 0.0;
    double p = 2.0;
    double kappa_s = 0.0;
    double C_1p = 1.0;
    /// Fractional Sobolev exponent; +inf when s*p >= 1.
    double p_star = std::numeric_limits<double>::infinity();
    /// Conjugate of p_star.
    double p_natural = 1.0;

    [[nodiscard]] bool is_local() const { return s == 1.0; }
};

/// Throws ConfigError unless 0 < s <= 1 and 1 < p < inf.
FractionalParams make_params(double s, double p);

/// Jordan decomposition f = f_plus - f_minus, both nonnegative.
std::pair<GridFunction, GridFunction> pos_neg_split(const GridFunction& f);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
};

struct ProblemSpec {
    std::string catalog_id;
    GridFunction f;
    GridFunction psi;
    Interval omega;
    double lambda = 0.0;

    [[nodiscard]] bool has_obstacle() const;
    [[nodiscard]] const Grid& grid() const { return f.grid(); }
};

/// Catalog ids: "CAT-A", "CAT-B", "CAT-C", "CAT-D". Throws ConfigError otherwise.
ProblemSpec catalog_problem(std::string_view catalog_id, GridPtr grid);

/// Checks the ProblemSpec invariants (psi <= 0 at Dirichlet nodes, f <= -lambda on omega).
void validate_problem(const ProblemSpec& problem);

/// Problem restricted to a coarser grid by injection (n_cells must divide evenly).
ProblemSpec restrict_problem(const ProblemSpec& problem, GridPtr coarse);

} // namespace nlobs
