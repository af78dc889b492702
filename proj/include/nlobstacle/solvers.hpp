#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "nlobstacle/grid.hpp"
#include "nlobstacle/operator.hpp"
#include "nlobstacle/penalty.hpp"

namespace nlobs {

enum class SolverMethod {
    /// Projected Newton on the energy with coarse-grid initial guesses; nodewise
    /// Gauss-Seidel sweeps take over whenever a Newton step stalls.
    newton,
    /// Plain projected nonlinear Gauss-Seidel, ascending node order.
    gauss_seidel,
};

/// Accepts "newton" and "gauss-seidel"; throws ConfigError otherwise.
SolverMethod parse_solver_method(std::string_view name);

struct SolverOptions {
    double tol = 1e-8;
    long max_sweeps = 100000;
    int max_newton = 200;
    SolverMethod method = SolverMethod::newton;
    /// Start from a solve on the grid with half as many cells (recursively).
    bool nested = true;
    int coarsest_cells = 64;

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

struct SolveReport {
    GridFunction u;
    /// The operator applied to u.
    GridFunction operator_values;
    double residual = 0.0;
    long sweeps = 0;
    int newton_steps = 0;
    bool converged = false;
    std::chrono::duration<double> wall_time{0.0};
    FractionalParams params;
    std::string catalog_id;
    std::optional<double> eps;

    /// Newton steps plus Gauss-Seidel sweeps on the finest grid.
    [[nodiscard]] long iterations() const { return sweeps + newton_steps; }
};

/**
 * Minimizes energy(u) - h sum f_i u_i over u_i >= psi_i.
 * `initial` (projected onto the constraint) replaces the default start max(psi, 0)
 * and disables the coarse-grid start.
 */
SolveReport solve_vi(const EnergyOperator& op, const ProblemSpec& problem, const SolverOptions& opts,
                     const GridFunction* initial = nullptr);

/// zeta = (A psi - f)^+, which is f^- for psi = 0.
GridFunction penalty_shift(const EnergyOperator& op, const ProblemSpec& problem);

/**
 * Solves A u - (f + zeta) + zeta theta_eps(u - psi) = 0, which for psi = 0 is
 * A u = f^+ - f^- theta_eps(u).
 */
SolveReport solve_penalized(const EnergyOperator& op, const ProblemSpec& problem, const PenaltyFn& pen,
                            const SolverOptions& opts, const GridFunction* initial = nullptr);

enum class SemilinearFamily {
    none,         ///< G(z) = 0
    linear_decay, ///< G(z) = -c z, c >= 0
    penalty,      ///< G(z) = -weight theta_eps(z)
};

/// Accepts "none", "linear-decay", "penalty"; throws ConfigError otherwise.
SemilinearFamily parse_semilinear_family(std::string_view name);

/// The monotone part G of F(x, z) = g(x) + G(x, z).
class SemilinearTerm {
public:
    static SemilinearTerm none();
    /// Throws ConfigError for c < 0 (G would be increasing).
    static SemilinearTerm linear_decay(double c);
    /// Throws ConfigError if weight has a negative entry.
    static SemilinearTerm penalty(GridFunction weight, PenaltyFn pen);

    [[nodiscard]] SemilinearFamily family() const { return family_; }
    [[nodiscard]] double c() const { return c_; }
    [[nodiscard]] const GridFunction& weight() const { return weight_; }
    [[nodiscard]] const std::optional<PenaltyFn>& pen() const { return pen_; }

private:
    SemilinearFamily family_ = SemilinearFamily::none;
    double c_ = 0.0;
    GridFunction weight_;
    std::optional<PenaltyFn> pen_;
};

/// Solves A u = g + G(u) with zero exterior data.
SolveReport solve_semilinear(const EnergyOperator& op, const GridFunction& g, const SemilinearTerm& term,
                             const SolverOptions& opts, const GridFunction* initial = nullptr);

/// max_i |min(u_i - psi_i, (A u)_i - f_i)| over interior nodes.
double complementarity_residual(const EnergyOperator& op, const GridFunction& u, const ProblemSpec& problem);

} // namespace nlobs
