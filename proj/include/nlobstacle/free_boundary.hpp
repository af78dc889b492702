#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nlobstacle/grid.hpp"
#include "nlobstacle/operator.hpp"
#include "nlobstacle/solvers.hpp"

namespace nlobs {

struct CoincidenceSet {
    double tol_u = 0.0;
    /// Grid node indices (1..n_cells-1) where u - psi <= tol_u.
    std::vector<int> indices;
    /// Maximal runs of indices as [x_first - h/2, x_last + h/2].
    std::vector<Interval> intervals;
    GridFunction chi;

    [[nodiscard]] bool empty() const { return indices.empty(); }
};

struct FreeBoundary {
    /// Midpoints of interior edges where chi changes value, ascending.
    std::vector<double> points;
};

struct QuasiCharacteristic {
    GridFunction theta;
    /// Per grid node; true where f^- > tol_f (never at the Dirichlet nodes).
    std::vector<char> valid_mask;
};

/// max(10 tol^{1/(p-1)}, 1e-6) * ||u||_inf, floored at 1e-10.
double default_tol_u(const GridFunction& u, double solver_tol, double p);

/// {u <= tol_u}. Throws DomainError unless tol_u > 0.
CoincidenceSet coincidence_set(const GridFunction& u, double tol_u);
/// {u - psi <= tol_u}.
CoincidenceSet coincidence_set(const GridFunction& u, const GridFunction& psi, double tol_u);

FreeBoundary free_boundary(const CoincidenceSet& coin);

/// theta = (f^+ - A u) / f^- where f^- > tol_f; elsewhere 1 if u > tol_u and 0 otherwise.
QuasiCharacteristic recover_quasi_characteristic(const SolveReport& report, const ProblemSpec& problem,
                                                 double tol_f, double tol_u);

/**
 * Hausdorff distance between finite unions of closed intervals (points are
 * degenerate intervals). One empty side gives +inf, both empty give 0.
 */
double hausdorff_distance(std::span<const Interval> a, std::span<const Interval> b);
double hausdorff_distance(std::span<const double> a, std::span<const double> b);

/// Intervals of a coincidence set clipped to a window; empty parts are dropped.
std::vector<Interval> clip(std::span<const Interval> parts, const Interval& window);
/// Points inside a window.
std::vector<double> clip(std::span<const double> points, const Interval& window);

/// h * #{interior i : chiA_i != chiB_i}, optionally only over nodes inside `window`.
double lebesgue_distance(const GridFunction& chi_a, const GridFunction& chi_b,
                         std::optional<Interval> window = std::nullopt);

struct GrowthSample {
    double z = 0.0;
    double r = 0.0;
    double sup_ball = 0.0;
    /// C1_hat * r^{p/(p-1)}
    double bound = 0.0;
};

struct GrowthReport {
    double C1_hat = 0.0;
    /// Least-squares slope of log sup_ball against log r over all samples.
    double exponent = 0.0;
    std::vector<GrowthSample> samples;

    [[nodiscard]] bool empty() const { return samples.empty(); }
};

/**
 * Nondegeneracy at the free boundary: for each free-boundary point z and each r
 * with B_r(z) inside the domain, the sup over B_r(z) of the piecewise-linear
 * interpolant of u restricted to {u > tol_u}. Empty when the coincidence set or
 * the positivity set is empty.
 */
GrowthReport growth_check(const GridFunction& u, const CoincidenceSet& coin, std::span<const double> r_list,
                          double p);

/// max over node pairs in the window of |u_i - u_j| / |x_i - x_j|^beta.
double holder_seminorm(const GridFunction& u, double beta, const Interval& window);

/// max_i max(f_i - (A u)_i, (A u)_i - max(f_i, (A psi)_i), 0).
double lewy_stampacchia_residual(const EnergyOperator& op, const SolveReport& report,
                                 const ProblemSpec& problem);

} // namespace nlobs
