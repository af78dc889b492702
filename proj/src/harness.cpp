#include "nlobstacle/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include "nlobstacle/error.hpp"
#include "nlobstacle/operator.hpp"

namespace nlobs {

WindowPolicy parse_window_policy(std::string_view name)
{
    if (name == "auto") {
        return WindowPolicy::automatic;
    }
    if (name == "window") {
        return WindowPolicy::window;
    }
    if (name == "full") {
        return WindowPolicy::full;
    }
    throw ConfigError("study.window_policy: expected auto, window or full, got '" + std::string(name) + "'");
}

std::string_view to_string(WindowPolicy policy)
{
    switch (policy) {
    case WindowPolicy::automatic:
        return "auto";
    case WindowPolicy::window:
        return "window";
    case WindowPolicy::full:
        return "full";
    }
    return "auto";
}

std::string_view to_string(SweepKind kind)
{
    return kind == SweepKind::eps ? "eps" : "s";
}

bool SweepReport::all_converged() const
{
    return reference.converged &&
           std::all_of(rows.begin(), rows.end(), [](const MetricRow& r) { return r.converged; });
}

RateFit fit_rate(std::span<const std::pair<double, double>> rows)
{
    RateFit fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [param, value] : rows) {
        if (param > 0.0 && value > 0.0 && std::isfinite(value)) {
            pts.emplace_back(std::log(param), std::log(value));
        }
    }
    if (pts.size() < 3) {
        return fit;
    }
    const double m = static_cast<double>(pts.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) {
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    // A perfectly flat sequence has nothing left to explain.
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.degenerate = false;
    return fit;
}

bool decreasing_trend(std::span<const double> values)
{
    if (values.size() < 2 || !(values.back() < values.front())) {
        return false;
    }
    int inversions = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] > values[k - 1]) {
            ++inversions;
        }
    }
    return inversions <= 1;
}

namespace {

// Everything the metrics need from one converged (or not) solve.
struct Snapshot {
    const SolveReport* report = nullptr;
    double tol_u = 0.0;
    CoincidenceSet coin;
    CoincidenceSet coin_lo;
    CoincidenceSet coin_hi;
    FreeBoundary fb;
    QuasiCharacteristic theta;
};

CoincidenceSet contact(const SolveReport& report, const ProblemSpec& problem, double tol_u)
{
    return problem.has_obstacle() ? coincidence_set(report.u, problem.psi, tol_u)
                                  : coincidence_set(report.u, tol_u);
}

Snapshot snapshot(const SolveReport& report, const ProblemSpec& problem, const StudyOptions& opts)
{
    Snapshot out;
    out.report = &report;
    out.tol_u = opts.tol_u > 0.0 ? opts.tol_u : default_tol_u(report.u, opts.solver.tol, report.params.p);
    out.coin = contact(report, problem, out.tol_u);
    out.coin_lo = contact(report, problem, out.tol_u / 10.0);
    out.coin_hi = contact(report, problem, out.tol_u * 10.0);
    out.fb = free_boundary(out.coin);
    out.theta = recover_quasi_characteristic(report, problem, opts.tol_f, out.tol_u);
    return out;
}

bool use_window(const ProblemSpec& problem, WindowPolicy policy)
{
    switch (policy) {
    case WindowPolicy::window:
        return true;
    case WindowPolicy::full:
        return false;
    case WindowPolicy::automatic:
        break;
    }
    return problem.lambda > 0.0;
}

double fb_distance(const CoincidenceSet& a, const CoincidenceSet& b, const std::optional<Interval>& window)
{
    const FreeBoundary fa = free_boundary(a);
    const FreeBoundary fb = free_boundary(b);
    if (!window) {
        return hausdorff_distance(std::span<const double>(fa.points), std::span<const double>(fb.points));
    }
    const auto ca = clip(std::span<const double>(fa.points), *window);
    const auto cb = clip(std::span<const double>(fb.points), *window);
    return hausdorff_distance(std::span<const double>(ca), std::span<const double>(cb));
}

double theta_gap(const Snapshot& a, const Snapshot& b, const ProblemSpec& problem, int which)
{
    const Grid& grid = problem.grid();
    double sum = 0.0;
    for (int i = 1; i < grid.n_cells; ++i) {
        const double x = grid.x(i);
        if (!problem.omega.contains(x)) {
            continue;
        }
        // Test functions live on (-1, 1); map the domain onto it.
        const double xi = (2.0 * x - grid.a - grid.b) / grid.length();
        const double phi = which == 1 ? std::cos(0.5 * std::numbers::pi * xi) : 1.0 - xi * xi;
        const auto k = static_cast<std::size_t>(i);
        sum += (a.theta.theta[k] - b.theta.theta[k]) * phi;
    }
    return std::abs(grid.h * sum);
}

double sup_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

GridFunction difference(const GridFunction& a, const GridFunction& b)
{
    GridFunction out(a.grid_ptr());
    for (std::size_t k = 0; k < a.size(); ++k) {
        out[k] = a[k] - b[k];
    }
    return out;
}

Interval holder_window(const Grid& grid)
{
    const double shrink = 0.05 * grid.length();
    return {grid.a + shrink, grid.b - shrink};
}

// All MetricRow fields except wr_diff, which depends on the sweep kind.
MetricRow compare(const EnergyOperator& op, const ProblemSpec& problem, const Snapshot& row, const Snapshot& ref,
                  const StudyOptions& opts)
{
    const SolveReport& rep = *row.report;
    MetricRow m;
    m.converged = rep.converged;
    m.residual = rep.residual;
    m.sweeps = rep.iterations();
    m.tol_u = row.tol_u;

    const GridFunction diff = difference(rep.u, ref.report->u);
    m.sup_diff = sup_abs(diff.values());
    m.lp_diff = gagliardo_seminorm(problem.f.grid_ptr(), 0.0, rep.params.p, diff).value;

    std::optional<Interval> window;
    if (use_window(problem, opts.window_policy)) {
        window = problem.omega;
    }
    m.d_L = lebesgue_distance(row.coin.chi, ref.coin.chi, window);
    m.d_L_full = lebesgue_distance(row.coin.chi, ref.coin.chi);
    m.d_H_coin = hausdorff_distance(std::span<const Interval>(row.coin.intervals),
                                    std::span<const Interval>(ref.coin.intervals));
    m.d_H_fb = fb_distance(row.coin, ref.coin, window);
    m.d_H_fb_full = fb_distance(row.coin, ref.coin, std::nullopt);
    m.d_L_tol_lo = lebesgue_distance(row.coin_lo.chi, ref.coin_lo.chi, window);
    m.d_L_tol_hi = lebesgue_distance(row.coin_hi.chi, ref.coin_hi.chi, window);
    m.d_H_fb_tol_lo = fb_distance(row.coin_lo, ref.coin_lo, window);
    m.d_H_fb_tol_hi = fb_distance(row.coin_hi, ref.coin_hi, window);

    m.theta_gap_1 = theta_gap(row, ref, problem, 1);
    m.theta_gap_2 = theta_gap(row, ref, problem, 2);
    m.ls_residual = std::max(lewy_stampacchia_residual(op, rep, problem), 0.0);
    m.holder_beta = holder_seminorm(rep.u, opts.holder_beta, holder_window(problem.grid()));
    m.free_boundary = row.fb.points;

    m.min_u = std::numeric_limits<double>::infinity();
    for (int i = 1; i < problem.grid().n_cells; ++i) {
        const auto k = static_cast<std::size_t>(i);
        m.min_u = std::min(m.min_u, rep.u[k] - problem.psi[k]);
    }

    const GrowthReport growth = growth_check(rep.u, row.coin, opts.growth_r, rep.params.p);
    if (!growth.empty()) {
        m.growth_C1 = growth.C1_hat;
        m.growth_exponent = growth.exponent;
    }
    return m;
}

ReferenceSummary summarize(const Snapshot& ref, double param)
{
    ReferenceSummary out;
    out.param = param;
    out.residual = ref.report->residual;
    out.converged = ref.report->converged;
    out.sweeps = ref.report->iterations();
    out.free_boundary = ref.fb.points;
    out.coincidence = ref.coin.intervals;
    return out;
}

void add_fit(SweepReport& report, const std::string& name, double MetricRow::*field,
             const std::function<double(const MetricRow&)>& abscissa)
{
    std::vector<std::pair<double, double>> pts;
    for (const MetricRow& row : report.rows) {
        if (row.converged) {
            pts.emplace_back(abscissa(row), row.*field);
        }
    }
    report.rate_fits[name] = fit_rate(pts);
}

void fill_settings(SweepReport& report, const StudyOptions& opts)
{
    report.settings["solver.method"] = opts.solver.method == SolverMethod::newton ? "newton" : "gauss-seidel";
    report.settings["solver.theta_variant"] = std::string(to_string(opts.theta));
    report.settings["solver.warm_start"] = opts.warm_start ? "true" : "false";
    report.settings["operator.near_field"] = std::string(to_string(opts.near_field));
    report.settings["study.window_policy"] = std::string(to_string(opts.window_policy));
}

void require_problem(const ProblemSpec& problem)
{
    if (problem.f.empty()) {
        throw ConfigError("sweep: problem has no grid");
    }
    validate_problem(problem);
}

} // namespace

SweepReport run_eps_sweep(const ProblemSpec& problem, double s, double p, std::span<const double> eps_list,
                          const StudyOptions& opts)
{
    require_problem(problem);
    opts.solver.validate();
    if (eps_list.empty()) {
        throw ConfigError("penalty.eps_list: must not be empty");
    }
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0) || (k > 0 && !(eps_list[k] < eps_list[k - 1]))) {
            throw ConfigError("penalty.eps_list: entries must be positive and strictly decreasing");
        }
    }
    const FractionalParams params = make_params(s, p);
    const auto op = make_operator(problem.f.grid_ptr(), params, opts.near_field);

    SweepReport report;
    report.kind = SweepKind::eps;
    report.catalog_id = problem.catalog_id;
    report.fixed = {{"s", s}, {"p", p}, {"n_cells", problem.grid().n_cells}, {"tol", opts.solver.tol}};
    fill_settings(report, opts);

    const SolveReport vi = solve_vi(*op, problem, opts.solver);
    const Snapshot ref = snapshot(vi, problem, opts);
    report.reference = summarize(ref, 0.0);

    const GridFunction zeta = penalty_shift(*op, problem);
    double zeta_l1 = 0.0;
    for (double z : zeta.interior()) {
        zeta_l1 += problem.grid().h * z;
    }
    const double c_theta = PenaltyFn::C_theta(opts.theta);

    std::optional<GridFunction> previous;
    for (double eps : eps_list) {
        const PenaltyFn pen(eps, opts.theta);
        const GridFunction* start = (opts.warm_start && previous) ? &*previous : nullptr;
        const SolveReport sol = solve_penalized(*op, problem, pen, opts.solver, start);
        const Snapshot row = snapshot(sol, problem, opts);
        MetricRow m = compare(*op, problem, row, ref, opts);
        m.param = eps;
        m.wr_diff = op->energy_norm(difference(sol.u, vi.u));
        if (p >= 2.0) {
            m.derived_bound = std::pow(2.0, (p - 1.0) / p) * std::pow(c_theta * zeta_l1 * eps, 1.0 / p) +
                              4.0 * std::pow(opts.solver.tol, 1.0 / p);
            m.stated_bound = std::pow(2.0, -2.0 / p) * std::pow(c_theta * zeta_l1, 1.0 / p) * std::pow(eps, 1.0 / p);
        }
        report.rows.push_back(std::move(m));
        if (sol.converged) {
            previous = sol.u;
        }
    }
    const auto by_param = [](const MetricRow& r) { return r.param; };
    add_fit(report, "wr_diff", &MetricRow::wr_diff, by_param);
    add_fit(report, "sup_diff", &MetricRow::sup_diff, by_param);
    add_fit(report, "lp_diff", &MetricRow::lp_diff, by_param);
    return report;
}

SweepReport run_s_sweep(const ProblemSpec& problem, double p, std::span<const double> s_list, double sigma,
                        double r, const StudyOptions& opts)
{
    require_problem(problem);
    opts.solver.validate();
    if (s_list.empty()) {
        throw ConfigError("study.s_list: must not be empty");
    }
    for (std::size_t k = 0; k < s_list.size(); ++k) {
        if (!(s_list[k] > 0.0 && s_list[k] <= 0.95) || (k > 0 && !(s_list[k] > s_list[k - 1]))) {
            throw ConfigError("study.s_list: entries must lie in (0, 0.95] and strictly increase");
        }
    }
    if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw ConfigError("study.sigma: must lie in (0, 1]");
    }
    if (!(r >= 0.0 && r < sigma)) {
        throw ConfigError("study.r: must satisfy 0 <= r < sigma");
    }
    const GridPtr grid = problem.f.grid_ptr();

    SweepReport report;
    report.kind = SweepKind::s;
    report.catalog_id = problem.catalog_id;
    report.fixed = {{"p", p}, {"sigma", sigma}, {"r", r}, {"n_cells", grid->n_cells}, {"tol", opts.solver.tol}};
    fill_settings(report, opts);

    const auto ref_op = make_operator(grid, make_params(sigma, p), opts.near_field);
    const SolveReport ref_solve = solve_vi(*ref_op, problem, opts.solver);
    const Snapshot ref = snapshot(ref_solve, problem, opts);
    report.reference = summarize(ref, sigma);

    std::optional<KernelWeights> wr_weights;
    if (r > 0.0) {
        wr_weights = assemble_weights(grid, make_params(r, p), opts.near_field);
    }

    std::optional<GridFunction> previous;
    for (double s : s_list) {
        const auto op = make_operator(grid, make_params(s, p), opts.near_field);
        const GridFunction* start = (opts.warm_start && previous) ? &*previous : nullptr;
        const SolveReport sol = solve_vi(*op, problem, opts.solver, start);
        const Snapshot row = snapshot(sol, problem, opts);
        MetricRow m = compare(*op, problem, row, ref, opts);
        m.param = s;
        const GridFunction diff = difference(sol.u, ref_solve.u);
        m.wr_diff = wr_weights ? gagliardo_seminorm(*wr_weights, diff).value : m.lp_diff;
        report.rows.push_back(std::move(m));
        if (sol.converged) {
            previous = sol.u;
        }
    }
    const auto gap = [sigma](const MetricRow& row) { return std::abs(sigma - row.param); };
    add_fit(report, "sup_diff", &MetricRow::sup_diff, gap);
    add_fit(report, "wr_diff", &MetricRow::wr_diff, gap);
    add_fit(report, "d_L", &MetricRow::d_L, gap);
    add_fit(report, "d_H_fb", &MetricRow::d_H_fb, gap);
    return report;
}

BbmTable bbm_check(CatalogFn fn, double p, std::span<const double> s_list, double rel_tol)
{
    BbmTable table;
    table.fn = fn;
    table.p = p;
    const double grad = catalog_gradient_power(fn, p);
    for (double s : s_list) {
        BbmRow row;
        row.s = s;
        row.gradient_power = grad;
        try {
            const SeminormValue v = seminorm_quadrature(fn, s, p, rel_tol);
            row.quadrature_power = std::pow(v.value, p);
            row.rel_gap = std::abs(row.quadrature_power - grad) / grad;
            row.ok = true;
        } catch (const ConvergenceError&) {
            row.ok = false;
        }
        table.rows.push_back(row);
    }
    return table;
}

} // namespace nlobs
