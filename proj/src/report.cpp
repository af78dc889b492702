#include "nlobstacle/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlobstacle/error.hpp"

namespace nlobs {

using nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view name)
{
    if (name == "csv") {
        return ReportFormat::csv;
    }
    if (name == "json") {
        return ReportFormat::json;
    }
    if (name == "both") {
        return ReportFormat::both;
    }
    throw ConfigError("output.format: expected csv, json or both, got '" + std::string(name) + "'");
}

namespace {

std::string num17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// nlohmann turns non-finite numbers into null; keep inf distinguishable.
ordered_json jnum(double v)
{
    if (std::isnan(v)) {
        return nullptr;
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

ordered_json jvec(std::span<const double> v)
{
    ordered_json out = ordered_json::array();
    for (double x : v) {
        out.push_back(jnum(x));
    }
    return out;
}

ordered_json jintervals(std::span<const Interval> parts)
{
    ordered_json out = ordered_json::array();
    for (const Interval& iv : parts) {
        out.push_back({jnum(iv.lo), jnum(iv.hi)});
    }
    return out;
}

ordered_json row_json(const MetricRow& r)
{
    ordered_json j;
    j["param"] = jnum(r.param);
    j["sup_diff"] = jnum(r.sup_diff);
    j["lp_diff"] = jnum(r.lp_diff);
    j["wr_diff"] = jnum(r.wr_diff);
    j["d_L"] = jnum(r.d_L);
    j["d_H_coin"] = jnum(r.d_H_coin);
    j["d_H_fb"] = jnum(r.d_H_fb);
    j["theta_gap_1"] = jnum(r.theta_gap_1);
    j["theta_gap_2"] = jnum(r.theta_gap_2);
    j["ls_residual"] = jnum(r.ls_residual);
    j["holder_beta"] = jnum(r.holder_beta);
    j["sweeps"] = r.sweeps;
    j["converged"] = r.converged;
    j["residual"] = jnum(r.residual);
    j["tol_u"] = jnum(r.tol_u);
    j["min_u_minus_psi"] = jnum(r.min_u);
    j["free_boundary"] = jvec(r.free_boundary);
    j["derived_bound"] = jnum(r.derived_bound);
    j["stated_bound"] = jnum(r.stated_bound);
    ordered_json ex;
    ex["d_L_full"] = jnum(r.d_L_full);
    ex["d_H_fb_full"] = jnum(r.d_H_fb_full);
    ex["d_L_tol_u_div10"] = jnum(r.d_L_tol_lo);
    ex["d_L_tol_u_mul10"] = jnum(r.d_L_tol_hi);
    ex["d_H_fb_tol_u_div10"] = jnum(r.d_H_fb_tol_lo);
    ex["d_H_fb_tol_u_mul10"] = jnum(r.d_H_fb_tol_hi);
    ex["growth_C1"] = jnum(r.growth_C1);
    ex["growth_exponent"] = jnum(r.growth_exponent);
    j["exploratory"] = std::move(ex);
    return j;
}

} // namespace

std::string report_filename(std::string_view catalog, std::string_view kind, double p, double sigma,
                            std::string_view ext)
{
    std::string out(catalog);
    out += '_';
    out += kind;
    out += '_';
    out += short_num(p);
    out += '_';
    out += short_num(sigma);
    out += '.';
    out += ext;
    return out;
}

std::string sweep_csv(const SweepReport& report)
{
    std::ostringstream os;
    os << kSweepCsvHeader << '\n';
    for (const MetricRow& r : report.rows) {
        for (double v : {r.param, r.sup_diff, r.lp_diff, r.wr_diff, r.d_L, r.d_H_coin, r.d_H_fb, r.theta_gap_1,
                         r.theta_gap_2, r.ls_residual, r.holder_beta}) {
            os << num17(v) << ',';
        }
        os << r.sweeps << '\n';
    }
    return os.str();
}

std::string sweep_json(const SweepReport& report)
{
    ordered_json j;
    j["kind"] = report.kind == SweepKind::eps ? "eps-sweep" : "s-sweep";
    j["problem"] = report.catalog_id;
    ordered_json fixed = ordered_json::object();
    for (const auto& [k, v] : report.fixed) {
        fixed[k] = jnum(v);
    }
    j["fixed"] = std::move(fixed);
    ordered_json settings = ordered_json::object();
    for (const auto& [k, v] : report.settings) {
        settings[k] = v;
    }
    j["settings"] = std::move(settings);
    ordered_json ref;
    ref["param"] = jnum(report.reference.param);
    ref["residual"] = jnum(report.reference.residual);
    ref["converged"] = report.reference.converged;
    ref["sweeps"] = report.reference.sweeps;
    ref["free_boundary"] = jvec(report.reference.free_boundary);
    ref["coincidence"] = jintervals(report.reference.coincidence);
    j["reference"] = std::move(ref);
    ordered_json rows = ordered_json::array();
    for (const MetricRow& r : report.rows) {
        rows.push_back(row_json(r));
    }
    j["rows"] = std::move(rows);
    ordered_json fits = ordered_json::object();
    for (const auto& [name, f] : report.rate_fits) {
        ordered_json e;
        e["slope"] = jnum(f.slope);
        e["intercept"] = jnum(f.intercept);
        e["r_squared"] = jnum(f.r_squared);
        e["degenerate"] = f.degenerate;
        fits[name] = std::move(e);
    }
    j["rate_fits"] = std::move(fits);
    j["all_converged"] = report.all_converged();
    return j.dump(2) + '\n';
}

std::string solve_csv(const SolveSummary& summary)
{
    const SolveReport& rep = *summary.report;
    std::ostringstream os;
    os << "index,x,u,operator\n";
    const Grid& grid = rep.u.grid();
    for (int i = 0; i <= grid.n_cells; ++i) {
        const auto k = static_cast<std::size_t>(i);
        os << i << ',' << num17(grid.x(i)) << ',' << num17(rep.u[k]) << ',' << num17(rep.operator_values[k]) << '\n';
    }
    return os.str();
}

std::string solve_json(std::span<const SolveSummary> summaries)
{
    ordered_json j = ordered_json::object();
    for (const SolveSummary& s : summaries) {
        const SolveReport& rep = *s.report;
        ordered_json e;
        e["problem"] = rep.catalog_id;
        ordered_json params;
        params["s"] = jnum(rep.params.s);
        params["p"] = jnum(rep.params.p);
        e["params"] = std::move(params);
        e["n_cells"] = rep.u.grid().n_cells;
        e["eps"] = rep.eps ? jnum(*rep.eps) : ordered_json(nullptr);
        e["converged"] = rep.converged;
        e["residual"] = jnum(rep.residual);
        e["sweeps"] = rep.sweeps;
        e["newton_steps"] = rep.newton_steps;
        e["tol_u"] = jnum(s.tol_u);
        e["complementarity_residual"] = jnum(s.complementarity);
        e["lewy_stampacchia_residual"] = jnum(s.lewy_stampacchia);
        e["coincidence"] = jintervals(s.coincidence.intervals);
        e["free_boundary"] = jvec(s.free_boundary.points);
        e["x"] = jvec(rep.u.grid().nodes);
        e["u"] = jvec(rep.u.values());
        e["operator"] = jvec(rep.operator_values.values());
        j[s.kind] = std::move(e);
    }
    return j.dump(2) + '\n';
}

std::string bbm_csv(const BbmTable& table)
{
    std::ostringstream os;
    os << "s,quadrature_power,gradient_power,rel_gap,ok\n";
    for (const BbmRow& r : table.rows) {
        os << num17(r.s) << ',' << num17(r.quadrature_power) << ',' << num17(r.gradient_power) << ','
           << num17(r.rel_gap) << ',' << (r.ok ? 1 : 0) << '\n';
    }
    return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace nlobs
