#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlobstacle/grid.hpp"
#include "nlobstacle/harness.hpp"
#include "nlobstacle/penalty.hpp"
#include "nlobstacle/quadrature.hpp"
#include "nlobstacle/solvers.hpp"
#include "nlobstacle/weights.hpp"

namespace nlobs {

/// Result of one property suite: a printable table plus the first failing case.
struct CheckOutcome {
    std::string name;
    long cases = 0;
    long failures = 0;
    std::vector<std::string> lines;
    std::string counterexample;

    [[nodiscard]] bool passed() const { return failures == 0 && cases > 0; }
};

/**
 * Scalar inequality for the p-Laplacian flux on random (a, b):
 *   (Phi(a) - Phi(b))(a - b) >= 2^{2-p} |a-b|^p                  (p >= 2)
 *   (Phi(a) - Phi(b))(a - b) >= (p-1) |a-b|^2 / (|a|+|b|)^{2-p}  (1 < p < 2)
 * with relative slack. Equality cases (relative gap <= slack) are counted;
 * a = -b is always included.
 */
CheckOutcome check_pineq(double p, std::uint64_t seed, long pairs = 10000, double rel_slack = 1e-12);

struct CoercivitySetup {
    GridPtr grid;
    double s = 0.5;
    double p = 2.0;
    NearField near_field = NearField::zeta_corrected;
    long pairs = 1000;
    double rel_slack = 1e-10;
};

/**
 * Discrete strong coercivity <Au - Av, u - v>_h against the lower bound of the
 * matching branch, and strict T-monotonicity <Au - Av, (u - v)^+>_h > 0, on
 * random solution-space pairs.
 */
CheckOutcome check_coercivity(const CoercivitySetup& setup, std::uint64_t seed);

/// Quadrature table toward s = 1; passes when every row converged, the last gap is <= gap_tol and gaps shrink.
CheckOutcome check_bbm(CatalogFn fn, double p, std::span<const double> s_list, double rel_tol,
                       double gap_tol = 0.02);
/// Same verdict for a table computed elsewhere.
CheckOutcome check_bbm(const BbmTable& table, double rel_tol, double gap_tol = 0.02);

struct ProblemCheckSetup {
    ProblemSpec problem;
    double s = 0.5;
    double p = 2.0;
    NearField near_field = NearField::zeta_corrected;
    SolverOptions solver;
    /// <= 0 selects default_tol_u.
    double tol_u = 0.0;
    double tol_f = 1e-3;
};

/// Solves the obstacle problem and requires the two-sided operator bound within 10 tol.
CheckOutcome check_lewy_stampacchia(const ProblemCheckSetup& setup);

/// -1e3 tol <= theta <= 1 + 1e3 tol on valid nodes, and theta >= 1 - 1e3 tol where u > tol_u.
/// Throws ConfigError for a nonzero obstacle.
CheckOutcome check_theta_sandwich(const ProblemCheckSetup& setup);

} // namespace nlobs
