// Command-line front end: solves, sweeps and property checks driven by one config file.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlobstacle/checks.hpp"
#include "nlobstacle/config.hpp"
#include "nlobstacle/error.hpp"
#include "nlobstacle/free_boundary.hpp"
#include "nlobstacle/harness.hpp"
#include "nlobstacle/report.hpp"

namespace {

using namespace nlobs;

enum Exit : int {
    ok = 0,
    config_error = 1,
    not_converged = 2,
    property_failed = 3,
};

// A ProblemSpec built from the config grid and catalog.
ProblemSpec config_problem(const RunConfig& cfg)
{
    return catalog_problem(cfg.catalog, build_grid(cfg.a, cfg.b, cfg.n_cells));
}

double require_s(const RunConfig& cfg, const std::string& command)
{
    if (!cfg.s) {
        throw ConfigError("frac.s: required for " + command);
    }
    return *cfg.s;
}

bool wants_csv(const RunConfig& cfg)
{
    return cfg.format != ReportFormat::json;
}

bool wants_json(const RunConfig& cfg)
{
    return cfg.format != ReportFormat::csv;
}

void note_written(const std::filesystem::path& path)
{
    std::printf("wrote %s\n", path.string().c_str());
}

SolveSummary summarize(const EnergyOperator& op, const SolveReport& rep, const ProblemSpec& problem,
                       const RunConfig& cfg, std::string kind)
{
    SolveSummary out;
    out.report = &rep;
    out.kind = std::move(kind);
    out.tol_u = cfg.tol_u > 0.0 ? cfg.tol_u : default_tol_u(rep.u, cfg.solver.tol, rep.params.p);
    out.coincidence = problem.has_obstacle() ? coincidence_set(rep.u, problem.psi, out.tol_u)
                                             : coincidence_set(rep.u, out.tol_u);
    out.free_boundary = free_boundary(out.coincidence);
    out.complementarity = complementarity_residual(op, rep.u, problem);
    out.lewy_stampacchia = lewy_stampacchia_residual(op, rep, problem);
    return out;
}

int cmd_solve(const RunConfig& cfg)
{
    const double s = require_s(cfg, "solve");
    const ProblemSpec problem = config_problem(cfg);
    const auto op = make_operator(problem.f.grid_ptr(), make_params(s, cfg.p), cfg.near_field);

    std::vector<SolveReport> reports;
    reports.reserve(2);
    reports.push_back(solve_vi(*op, problem, cfg.solver));
    if (cfg.eps) {
        reports.push_back(solve_penalized(*op, problem, PenaltyFn(*cfg.eps, cfg.theta), cfg.solver));
    }
    std::vector<SolveSummary> summaries;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        summaries.push_back(summarize(*op, reports[k], problem, cfg, k == 0 ? "vi" : "penalized"));
    }

    bool all_converged = true;
    for (const SolveSummary& sm : summaries) {
        const SolveReport& rep = *sm.report;
        all_converged = all_converged && rep.converged;
        std::printf("%s %s s=%g p=%g n_cells=%d: %s, residual %.3e, %d newton steps, %ld sweeps\n",
                    sm.kind.c_str(), problem.catalog_id.c_str(), s, cfg.p, cfg.n_cells,
                    rep.converged ? "converged" : "NOT converged", rep.residual, rep.newton_steps, rep.sweeps);
        std::printf("  free boundary:");
        for (double z : sm.free_boundary.points) {
            std::printf(" %.6f", z);
        }
        std::printf("\n  max u = %.10g\n", rep.u.max_abs());
    }

    const std::filesystem::path dir(cfg.out_dir);
    if (wants_json(cfg)) {
        const auto path = dir / report_filename(cfg.catalog, "solve", cfg.p, s, "json");
        write_text(path, solve_json(summaries));
        note_written(path);
    }
    if (wants_csv(cfg)) {
        for (const SolveSummary& sm : summaries) {
            const auto path = dir / report_filename(cfg.catalog, "solve-" + sm.kind, cfg.p, s, "csv");
            write_text(path, solve_csv(sm));
            note_written(path);
        }
    }
    return all_converged ? ok : not_converged;
}

int finish_sweep(const RunConfig& cfg, const SweepReport& report, double sigma_tag)
{
    const std::string kind = report.kind == SweepKind::eps ? "eps-sweep" : "s-sweep";
    std::fputs(sweep_csv(report).c_str(), stdout);
    for (const auto& [metric, fit] : report.rate_fits) {
        if (fit.degenerate) {
            std::printf("fit %-9s degenerate (fewer than 3 positive values)\n", metric.c_str());
        } else {
            std::printf("fit %-9s slope %.4f  R^2 %.4f\n", metric.c_str(), fit.slope, fit.r_squared);
        }
    }
    const std::filesystem::path dir(cfg.out_dir);
    if (wants_csv(cfg)) {
        const auto path = dir / report_filename(cfg.catalog, kind, cfg.p, sigma_tag, "csv");
        write_text(path, sweep_csv(report));
        note_written(path);
    }
    if (wants_json(cfg)) {
        const auto path = dir / report_filename(cfg.catalog, kind, cfg.p, sigma_tag, "json");
        write_text(path, sweep_json(report));
        note_written(path);
    }
    if (report.all_converged()) {
        return ok;
    }
    if (!report.reference.converged) {
        std::fprintf(stderr, "reference solve did not converge (residual %.3e)\n", report.reference.residual);
    }
    for (const MetricRow& row : report.rows) {
        if (!row.converged) {
            std::fprintf(stderr, "row %g did not converge (residual %.3e)\n", row.param, row.residual);
        }
    }
    return not_converged;
}

int cmd_sweep_eps(const RunConfig& cfg)
{
    const double s = require_s(cfg, "sweep-eps");
    if (cfg.eps_list.empty()) {
        throw ConfigError("penalty.eps_list: required for sweep-eps");
    }
    const SweepReport report = run_eps_sweep(config_problem(cfg), s, cfg.p, cfg.eps_list, cfg.study_options());
    return finish_sweep(cfg, report, s);
}

int cmd_sweep_s(const RunConfig& cfg)
{
    if (cfg.s_list.empty()) {
        throw ConfigError("study.s_list: required for sweep-s");
    }
    const SweepReport report =
        run_s_sweep(config_problem(cfg), cfg.p, cfg.s_list, cfg.sigma, cfg.r_or_default(), cfg.study_options());
    return finish_sweep(cfg, report, cfg.sigma);
}

ProblemCheckSetup problem_setup(const RunConfig& cfg, const std::string& which)
{
    ProblemCheckSetup setup;
    setup.problem = config_problem(cfg);
    setup.s = require_s(cfg, "check " + which);
    setup.p = cfg.p;
    setup.near_field = cfg.near_field;
    setup.solver = cfg.solver;
    setup.tol_u = cfg.tol_u;
    return setup;
}

CheckOutcome run_check(const RunConfig& cfg, const std::string& which)
{
    if (which == "pineq") {
        return check_pineq(cfg.p, cfg.seed);
    }
    if (which == "coercivity") {
        CoercivitySetup setup;
        setup.grid = build_grid(cfg.a, cfg.b, cfg.n_cells);
        setup.s = require_s(cfg, "check coercivity");
        if (setup.s == 1.0) {
            throw ConfigError("frac.s: check coercivity needs s < 1");
        }
        setup.p = cfg.p;
        setup.near_field = cfg.near_field;
        return check_coercivity(setup, cfg.seed);
    }
    if (which == "bbm") {
        return check_bbm(cfg.bbm_fn, cfg.p, cfg.bbm_s_list, cfg.bbm_rel_tol);
    }
    if (which == "lewy-stampacchia") {
        return check_lewy_stampacchia(problem_setup(cfg, which));
    }
    return check_theta_sandwich(problem_setup(cfg, which));
}

int cmd_check(const RunConfig& cfg, const std::string& which)
{
    std::vector<std::string> names;
    if (which == "all") {
        names = {"pineq", "coercivity", "bbm", "lewy-stampacchia", "theta-sandwich"};
    } else {
        names = {which};
    }
    bool passed = true;
    for (const std::string& name : names) {
        const CheckOutcome outcome = run_check(cfg, name);
        for (const std::string& line : outcome.lines) {
            std::printf("%s\n", line.c_str());
        }
        std::printf("%s: %s (%ld cases, %ld failures)\n", name.c_str(), outcome.passed() ? "PASS" : "FAIL",
                    outcome.cases, outcome.failures);
        if (!outcome.passed()) {
            passed = false;
            std::fprintf(stderr, "counterexample (%s): %s\n", name.c_str(), outcome.counterexample.c_str());
        }
    }
    return passed ? ok : property_failed;
}

int cmd_bbm(const RunConfig& cfg)
{
    const BbmTable table = bbm_check(cfg.bbm_fn, cfg.p, cfg.bbm_s_list, cfg.bbm_rel_tol);
    const CheckOutcome outcome = check_bbm(table, cfg.bbm_rel_tol);
    for (const std::string& line : outcome.lines) {
        std::printf("%s\n", line.c_str());
    }
    // The table approaches the s = 1 limit, hence the sigma tag 1.
    const auto path =
        std::filesystem::path(cfg.out_dir) / report_filename(to_string(cfg.bbm_fn), "bbm", cfg.p, 1.0, "csv");
    write_text(path, bbm_csv(table));
    note_written(path);
    if (!outcome.passed()) {
        std::fprintf(stderr, "counterexample (bbm): %s\n", outcome.counterexample.c_str());
        return property_failed;
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nonlocal obstacle problem solver and stability studies"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "Run configuration file")->required();
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_option("--seed", seed, "Seed for randomized suites (overrides check.seed)");

    auto* solve = app.add_subcommand("solve", "Solve the obstacle problem (and the penalized one if penalty.eps is set)");
    auto* sweep_eps = app.add_subcommand("sweep-eps", "Penalization sweep over penalty.eps_list");
    auto* sweep_s = app.add_subcommand("sweep-s", "Stability sweep over study.s_list against study.sigma");
    auto* check = app.add_subcommand("check", "Run a property suite");
    std::string which;
    check->add_option("which", which, "coercivity | pineq | bbm | lewy-stampacchia | theta-sandwich | all")
        ->required()
        ->check(CLI::IsMember({"coercivity", "pineq", "bbm", "lewy-stampacchia", "theta-sandwich", "all"}));
    auto* bbm = app.add_subcommand("bbm-check", "Tabulate the quadrature seminorm toward s = 1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (out_dir) {
            cfg.out_dir = *out_dir;
        }
        if (seed) {
            cfg.seed = *seed;
        }
        cfg.validate();
        if (solve->parsed()) {
            return cmd_solve(cfg);
        }
        if (sweep_eps->parsed()) {
            return cmd_sweep_eps(cfg);
        }
        if (sweep_s->parsed()) {
            return cmd_sweep_s(cfg);
        }
        if (check->parsed()) {
            return cmd_check(cfg, which);
        }
        if (bbm->parsed()) {
            return cmd_bbm(cfg);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return config_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return config_error;
    }
    return config_error;
}
