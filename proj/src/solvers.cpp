#include "nlobstacle/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nlobstacle/error.hpp"

namespace nlobs {

SolverMethod parse_solver_method(std::string_view name)
{
    if (name == "newton") {
        return SolverMethod::newton;
    }
    if (name == "gauss-seidel") {
        return SolverMethod::gauss_seidel;
    }
    throw ConfigError("solver.method: unknown method '" + std::string(name) +
                      "' (newton, gauss-seidel)");
}

void SolverOptions::validate() const
{
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw ConfigError("solver.tol must be a positive number");
    }
    if (max_sweeps < 0) {
        throw ConfigError("solver.max_sweeps must be nonnegative");
    }
    if (max_newton < 0) {
        throw ConfigError("solver.max_newton must be nonnegative");
    }
    if (coarsest_cells < 4) {
        throw ConfigError("solver.coarsest_cells must be at least 4");
    }
}

SemilinearFamily parse_semilinear_family(std::string_view name)
{
    if (name == "none") {
        return SemilinearFamily::none;
    }
    if (name == "linear-decay") {
        return SemilinearFamily::linear_decay;
    }
    if (name == "penalty") {
        return SemilinearFamily::penalty;
    }
    throw ConfigError("unknown semilinear family '" + std::string(name) +
                      "' (none, linear-decay, penalty)");
}

SemilinearTerm SemilinearTerm::none()
{
    return {};
}

SemilinearTerm SemilinearTerm::linear_decay(double c)
{
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw ConfigError("linear-decay coefficient must be >= 0 (G(z) = -c z must be nonincreasing)");
    }
    SemilinearTerm t;
    t.family_ = SemilinearFamily::linear_decay;
    t.c_ = c;
    return t;
}

SemilinearTerm SemilinearTerm::penalty(GridFunction weight, PenaltyFn pen)
{
    for (double v : weight.values()) {
        if (!(v >= 0.0)) {
            throw ConfigError("penalty weight must be nonnegative (G must be nonincreasing)");
        }
    }
    SemilinearTerm t;
    t.family_ = SemilinearFamily::penalty;
    t.weight_ = std::move(weight);
    t.pen_ = pen;
    return t;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * Everything except the operator, per interior node:
 *   gradient term  -q + m theta_eps(t - shift) + c t
 *   energy term    -q t + m Theta_eps(t - shift) + c t^2 / 2
 * and, for obstacle problems, the bound t >= lower.
 */
struct NodalModel {
    std::vector<double> q;
    std::vector<double> m;
    std::vector<double> c;
    std::vector<double> shift;
    std::vector<double> lower;
    bool constrained = false;
    std::optional<PenaltyFn> pen;

    [[nodiscard]] std::size_t size() const { return q.size(); }

    [[nodiscard]] double gradient(std::size_t i, double t) const
    {
        double v = -q[i] + c[i] * t;
        if (pen && m[i] != 0.0) {
            v += m[i] * pen->theta(t - shift[i]);
        }
        return v;
    }

    [[nodiscard]] double curvature(std::size_t i, double t) const
    {
        double v = c[i];
        if (pen && m[i] != 0.0) {
            v += m[i] * pen->slope(t - shift[i]);
        }
        return v;
    }

    [[nodiscard]] double energy(std::size_t i, double t) const
    {
        double v = (-q[i] + 0.5 * c[i] * t) * t;
        if (pen && m[i] != 0.0) {
            v += m[i] * pen->primitive(t - shift[i]);
        }
        return v;
    }

    /// Injection onto the grid with half the cells: coarse interior r is fine interior 2r + 1.
    [[nodiscard]] NodalModel coarsened() const
    {
        NodalModel out;
        out.constrained = constrained;
        out.pen = pen;
        const std::size_t n = (size() + 1) / 2 - 1;
        auto take = [n](const std::vector<double>& src) {
            std::vector<double> dst(n);
            for (std::size_t r = 0; r < n; ++r) {
                dst[r] = src[2 * r + 1];
            }
            return dst;
        };
        out.q = take(q);
        out.m = take(m);
        out.c = take(c);
        out.shift = take(shift);
        out.lower = constrained ? take(lower) : std::vector<double>(n, -kInf);
        return out;
    }

    static NodalModel zeros(std::size_t n)
    {
        NodalModel out;
        out.q.assign(n, 0.0);
        out.m.assign(n, 0.0);
        out.c.assign(n, 0.0);
        out.shift.assign(n, 0.0);
        out.lower.assign(n, -kInf);
        return out;
    }
};

struct LevelStats {
    long sweeps = 0;
    int newton_steps = 0;
    double residual = kInf;
    bool converged = false;
};

class Minimizer {
public:
    Minimizer(const EnergyOperator& op, const NodalModel& model, const SolverOptions& opts)
        : op_(op), model_(model), opts_(opts), n_(static_cast<std::size_t>(op.interior_count())),
          h_(op.grid().h), g_(n_), trial_(n_), g_trial_(n_), dir_(n_), diag_(n_), extra_(n_),
          rhs_(n_), free_(n_)
    {
    }

    LevelStats run(std::vector<double>& u)
    {
        LevelStats st;
        gradient(u, g_);
        st.residual = residual(u, g_);
        int newton_left = opts_.max_newton;
        const bool newton = opts_.method == SolverMethod::newton;
        while (st.residual > opts_.tol) {
            if (newton && newton_left > 0) {
                --newton_left;
                if (newton_step(u, st.residual)) {
                    ++st.newton_steps;
                    continue;
                }
            }
            if (st.sweeps >= opts_.max_sweeps) {
                break;
            }
            // Nodewise sweeps: either the whole method or a short burst after a stalled
            // Newton step, after which Newton gets another chance.
            const long burst = newton ? 10 : opts_.max_sweeps;
            for (long k = 0; k < burst && st.sweeps < opts_.max_sweeps && st.residual > opts_.tol; ++k) {
                sweep(u);
                ++st.sweeps;
                gradient(u, g_);
                st.residual = residual(u, g_);
            }
            if (newton && newton_left == 0 && st.sweeps >= opts_.max_sweeps) {
                break;
            }
        }
        st.converged = st.residual <= opts_.tol;
        return st;
    }

    void gradient(std::span<const double> u, std::span<double> g) const
    {
        op_.apply(u, g);
        for (std::size_t i = 0; i < n_; ++i) {
            g[i] += model_.gradient(i, u[i]);
        }
    }

    [[nodiscard]] double residual(std::span<const double> u, std::span<const double> g) const
    {
        double r = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double v = model_.constrained ? std::min(u[i] - model_.lower[i], g[i]) : g[i];
            r = std::max(r, std::abs(v));
        }
        return r;
    }

private:
    [[nodiscard]] double energy(std::span<const double> u) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            acc += model_.energy(i, u[i]);
        }
        return op_.energy(u) + h_ * acc;
    }

    void project(std::span<double> u) const
    {
        if (!model_.constrained) {
            return;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            u[i] = std::max(u[i], model_.lower[i]);
        }
    }

    // One projected Newton step (Bertsekas): nodes at the bound with a positive
    // gradient move along the scaled gradient, the rest take a Newton step on the
    // reduced Hessian; the projected arc is searched with an Armijo test on the energy.
    bool newton_step(std::vector<double>& u, double& res)
    {
        op_.hessian_diagonal(u, diag_);
        double width = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            extra_[i] = model_.curvature(i, u[i]);
            diag_[i] += extra_[i];
            if (model_.constrained) {
                const double target = std::max(u[i] - g_[i] / diag_[i], model_.lower[i]);
                width = std::max(width, std::abs(u[i] - target));
            }
        }
        const double eps_k = std::min(1e-3, width);
        for (std::size_t i = 0; i < n_; ++i) {
            const bool active = model_.constrained && u[i] - model_.lower[i] <= eps_k && g_[i] > 0.0;
            free_[i] = active ? 0 : 1;
            rhs_[i] = -g_[i];
        }
        if (!op_.newton_direction(u, free_, extra_, rhs_, dir_)) {
            return false;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (free_[i] == 0) {
                dir_[i] = -g_[i] / diag_[i];
            }
        }

        const double e0 = energy(u);
        double alpha = 1.0;
        for (int attempt = 0; attempt < 60; ++attempt, alpha *= 0.5) {
            double predicted = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                trial_[i] = u[i] + alpha * dir_[i];
            }
            project(trial_);
            for (std::size_t i = 0; i < n_; ++i) {
                predicted += g_[i] * (u[i] - trial_[i]);
            }
            predicted *= h_;
            gradient(trial_, g_trial_);
            const double res_trial = residual(trial_, g_trial_);
            bool accept = res_trial <= 0.5 * res;
            if (!accept && predicted > 0.0) {
                accept = e0 - energy(trial_) >= 1e-4 * predicted;
            }
            if (accept) {
                u.swap(trial_);
                g_.swap(g_trial_);
                res = res_trial;
                return true;
            }
            if (!(predicted > 0.0) && attempt > 0) {
                return false;
            }
        }
        return false;
    }

    struct Eval {
        double value;
        double slope;
    };

    [[nodiscard]] Eval nodal(int r, double t, std::span<const double> u) const
    {
        const RowValue row = op_.row(r, t, u);
        const auto i = static_cast<std::size_t>(r);
        return {row.value + model_.gradient(i, t), row.slope + model_.curvature(i, t)};
    }

    void sweep(std::vector<double>& u) const
    {
        double umin = 0.0;
        double umax = 0.0;
        double qmax = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            umin = std::min(umin, u[i]);
            umax = std::max(umax, u[i]);
            qmax = std::max(qmax, std::abs(model_.q[i]));
        }
        const double reach = 1.0 + qmax;
        for (std::size_t i = 0; i < n_; ++i) {
            u[i] = nodal_solve(static_cast<int>(i), u, umin, umax, reach);
        }
    }

    // Root of the increasing scalar map t -> nodal(r, t) on [lower_r, inf).
    [[nodiscard]] double nodal_solve(int r, std::span<const double> u, double umin, double umax,
                                     double reach) const
    {
        const auto i = static_cast<std::size_t>(r);
        const double target = 1e-2 * opts_.tol;
        double lo = 0.0;
        if (model_.constrained) {
            lo = model_.lower[i];
            if (nodal(r, lo, u).value >= 0.0) {
                return lo;
            }
        } else {
            double d = reach;
            lo = umin - d;
            while (nodal(r, lo, u).value > 0.0) {
                d *= 2.0;
                lo = umin - d;
            }
        }
        double d = reach;
        double hi = std::max(umax, lo) + d;
        while (nodal(r, hi, u).value < 0.0) {
            d *= 2.0;
            hi = std::max(umax, lo) + d;
        }
        double t = std::clamp(u[i], lo, hi);
        double width_before = hi - lo;
        for (int it = 0; it < 200; ++it) {
            const Eval e = nodal(r, t, u);
            if (std::abs(e.value) <= target) {
                return t;
            }
            (e.value < 0.0 ? lo : hi) = t;
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
                return 0.5 * (lo + hi);
            }
            double next = t - e.value / e.slope;
            const bool slow = (it % 3 == 2) && (hi - lo) > 0.5 * width_before;
            if (slow) {
                width_before = hi - lo;
            }
            if (!(next > lo && next < hi) || slow) {
                next = 0.5 * (lo + hi);
            }
            t = next;
        }
        return t;
    }

    const EnergyOperator& op_;
    const NodalModel& model_;
    const SolverOptions& opts_;
    std::size_t n_;
    double h_;
    std::vector<double> g_;
    std::vector<double> trial_;
    std::vector<double> g_trial_;
    std::vector<double> dir_;
    std::vector<double> diag_;
    std::vector<double> extra_;
    std::vector<double> rhs_;
    std::vector<char> free_;
};

std::vector<double> default_start(const NodalModel& model)
{
    std::vector<double> u(model.size(), 0.0);
    if (model.constrained) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = std::max(model.lower[i], 0.0);
        }
    }
    return u;
}

/// Piecewise-linear interpolation from the grid with half the cells.
std::vector<double> prolongate(const std::vector<double>& coarse, std::size_t fine_n)
{
    std::vector<double> fine(fine_n);
    auto at = [&](std::size_t node) {
        return (node == 0 || node > coarse.size()) ? 0.0 : coarse[node - 1];
    };
    for (std::size_t r = 0; r < fine_n; ++r) {
        const std::size_t node = r + 1;
        fine[r] = (node % 2 == 0) ? at(node / 2) : 0.5 * (at(node / 2) + at(node / 2 + 1));
    }
    return fine;
}

LevelStats solve_nested(const EnergyOperator& op, const NodalModel& model, const SolverOptions& opts,
                        std::vector<double>& u, bool warm)
{
    const Grid& grid = op.grid();
    if (!warm) {
        const bool coarsen = opts.method == SolverMethod::newton && opts.nested &&
                             grid.n_cells % 2 == 0 && grid.n_cells / 2 >= opts.coarsest_cells;
        if (coarsen) {
            const auto coarse_op = op.on_grid(build_grid(grid.a, grid.b, grid.n_cells / 2));
            const NodalModel coarse_model = model.coarsened();
            std::vector<double> uc;
            solve_nested(*coarse_op, coarse_model, opts, uc, false);
            u = prolongate(uc, model.size());
            if (model.constrained) {
                for (std::size_t i = 0; i < u.size(); ++i) {
                    u[i] = std::max(u[i], model.lower[i]);
                }
            }
        } else {
            u = default_start(model);
        }
    }
    int smoothing_steps = 0;
    if (op.params().p < 2.0 && opts.method == SolverMethod::newton) {
        // Phi_p has unbounded slope at 0 for p < 2, and Newton overshoots on node pairs
        // whose difference is near zero (mirror nodes of a symmetric solution). Walk
        // down a sequence of smoothed fluxes first; each stage starts the next one.
        SolverOptions stage = opts;
        stage.max_sweeps = 0;
        stage.max_newton = std::min(opts.max_newton, 40);
        for (double delta = 1e-3; delta > 1e-15; delta *= 1e-2) {
            const auto smooth_op = op.smoothed(delta);
            Minimizer minimizer(*smooth_op, model, stage);
            smoothing_steps += minimizer.run(u).newton_steps;
        }
    }
    Minimizer minimizer(op, model, opts);
    LevelStats st = minimizer.run(u);
    st.newton_steps += smoothing_steps;
    return st;
}

SolveReport finish(const EnergyOperator& op, std::vector<double>&& u, const LevelStats& st,
                   std::chrono::steady_clock::time_point start)
{
    SolveReport report;
    report.u = GridFunction(op.grid_ptr());
    std::copy(u.begin(), u.end(), report.u.interior().begin());
    report.operator_values = op.apply(report.u);
    report.residual = st.residual;
    report.sweeps = st.sweeps;
    report.newton_steps = st.newton_steps;
    report.converged = st.converged;
    report.params = op.params();
    report.wall_time = std::chrono::steady_clock::now() - start;
    return report;
}

SolveReport run(const EnergyOperator& op, const NodalModel& model, const SolverOptions& opts,
                const GridFunction* initial)
{
    opts.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> u;
    const bool warm = initial != nullptr;
    if (warm) {
        if (initial->empty() || !initial->grid().same_as(op.grid())) {
            throw ShapeError("solver: initial guess lives on a different grid");
        }
        u.assign(initial->interior().begin(), initial->interior().end());
        if (model.constrained) {
            for (std::size_t i = 0; i < u.size(); ++i) {
                u[i] = std::max(u[i], model.lower[i]);
            }
        }
    }
    const LevelStats st = solve_nested(op, model, opts, u, warm);
    return finish(op, std::move(u), st, start);
}

void require_problem_grid(const EnergyOperator& op, const ProblemSpec& problem)
{
    if (problem.f.empty() || !problem.grid().same_as(op.grid())) {
        throw ShapeError("solver: problem and operator live on different grids");
    }
    validate_problem(problem);
}

std::vector<double> interior_copy(const GridFunction& g)
{
    return {g.interior().begin(), g.interior().end()};
}

} // namespace

SolveReport solve_vi(const EnergyOperator& op, const ProblemSpec& problem, const SolverOptions& opts,
                     const GridFunction* initial)
{
    require_problem_grid(op, problem);
    NodalModel model = NodalModel::zeros(static_cast<std::size_t>(op.interior_count()));
    model.q = interior_copy(problem.f);
    model.lower = interior_copy(problem.psi);
    model.constrained = true;
    SolveReport report = run(op, model, opts, initial);
    report.catalog_id = problem.catalog_id;
    return report;
}

GridFunction penalty_shift(const EnergyOperator& op, const ProblemSpec& problem)
{
    require_problem_grid(op, problem);
    GridFunction zeta(op.grid_ptr());
    if (!problem.has_obstacle()) {
        // (A 0 - f)^+ = f^-
        for (int i = 1; i < op.grid().n_cells; ++i) {
            zeta[static_cast<std::size_t>(i)] = std::max(-problem.f[static_cast<std::size_t>(i)], 0.0);
        }
        return zeta;
    }
    const GridFunction a_psi = op.apply(problem.psi);
    for (int i = 1; i < op.grid().n_cells; ++i) {
        const auto k = static_cast<std::size_t>(i);
        zeta[k] = std::max(a_psi[k] - problem.f[k], 0.0);
    }
    return zeta;
}

SolveReport solve_penalized(const EnergyOperator& op, const ProblemSpec& problem, const PenaltyFn& pen,
                            const SolverOptions& opts, const GridFunction* initial)
{
    const GridFunction zeta = penalty_shift(op, problem);
    NodalModel model = NodalModel::zeros(static_cast<std::size_t>(op.interior_count()));
    const auto f = problem.f.interior();
    const auto z = zeta.interior();
    const auto psi = problem.psi.interior();
    for (std::size_t i = 0; i < model.size(); ++i) {
        model.q[i] = f[i] + z[i];
        model.m[i] = z[i];
        model.shift[i] = psi[i];
    }
    model.pen = pen;
    SolveReport report = run(op, model, opts, initial);
    report.catalog_id = problem.catalog_id;
    report.eps = pen.eps();
    return report;
}

SolveReport solve_semilinear(const EnergyOperator& op, const GridFunction& g, const SemilinearTerm& term,
                             const SolverOptions& opts, const GridFunction* initial)
{
    if (g.empty() || !g.grid().same_as(op.grid())) {
        throw ShapeError("solve_semilinear: g lives on a different grid");
    }
    NodalModel model = NodalModel::zeros(static_cast<std::size_t>(op.interior_count()));
    model.q = interior_copy(g);
    switch (term.family()) {
    case SemilinearFamily::none: break;
    case SemilinearFamily::linear_decay: model.c.assign(model.size(), term.c()); break;
    case SemilinearFamily::penalty:
        if (term.weight().empty() || !term.weight().grid().same_as(op.grid())) {
            throw ShapeError("solve_semilinear: penalty weight lives on a different grid");
        }
        model.m = interior_copy(term.weight());
        model.pen = term.pen();
        break;
    }
    SolveReport report = run(op, model, opts, initial);
    if (term.family() == SemilinearFamily::penalty) {
        report.eps = term.pen()->eps();
    }
    return report;
}

double complementarity_residual(const EnergyOperator& op, const GridFunction& u, const ProblemSpec& problem)
{
    require_same_grid(u, problem.f, "complementarity_residual");
    const GridFunction au = op.apply(u);
    double r = 0.0;
    for (int i = 1; i < op.grid().n_cells; ++i) {
        const auto k = static_cast<std::size_t>(i);
        r = std::max(r, std::abs(std::min(u[k] - problem.psi[k], au[k] - problem.f[k])));
    }
    return r;
}

} // namespace nlobs
