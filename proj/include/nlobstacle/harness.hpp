#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlobstacle/free_boundary.hpp"
#include "nlobstacle/penalty.hpp"
#include "nlobstacle/quadrature.hpp"
#include "nlobstacle/solvers.hpp"
#include "nlobstacle/weights.hpp"

namespace nlobs {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Where the set metrics d_L and d_H_fb are measured.
enum class WindowPolicy {
    automatic, ///< on omega when the catalog has lambda > 0, on the whole domain otherwise
    window,
    full,
};

/// Accepts "auto", "window", "full"; throws ConfigError otherwise.
WindowPolicy parse_window_policy(std::string_view name);
std::string_view to_string(WindowPolicy policy);

struct StudyOptions {
    SolverOptions solver;
    ThetaVariant theta = ThetaVariant::ramp;
    bool warm_start = true;
    NearField near_field = NearField::zeta_corrected;
    /// Coincidence threshold; <= 0 selects default_tol_u per solution.
    double tol_u = 0.0;
    double tol_f = 1e-3;
    double holder_beta = 0.1;
    WindowPolicy window_policy = WindowPolicy::automatic;
    std::vector<double> growth_r{0.01, 0.02, 0.04, 0.08};
};

struct RateFit {
    double slope = kNaN;
    double intercept = kNaN;
    double r_squared = kNaN;
    bool degenerate = true;
};

/// Least squares on (log param, log value); degenerate with fewer than 3 positive values.
RateFit fit_rate(std::span<const std::pair<double, double>> rows);

struct MetricRow {
    double param = 0.0;
    double sup_diff = 0.0;
    double lp_diff = 0.0;
    double wr_diff = 0.0;
    double d_L = 0.0;
    double d_H_coin = 0.0;
    double d_H_fb = 0.0;
    double theta_gap_1 = 0.0;
    double theta_gap_2 = 0.0;
    double ls_residual = 0.0;
    double holder_beta = 0.0;
    long sweeps = 0;

    // Reported in JSON only.
    bool converged = false;
    double residual = 0.0;
    double tol_u = 0.0;
    double d_L_full = 0.0;
    double d_H_fb_full = 0.0;
    /// d_L and d_H_fb recomputed with tol_u / 10 and 10 tol_u.
    double d_L_tol_lo = 0.0;
    double d_L_tol_hi = 0.0;
    double d_H_fb_tol_lo = 0.0;
    double d_H_fb_tol_hi = 0.0;
    std::vector<double> free_boundary;
    double min_u = 0.0;
    double growth_C1 = kNaN;
    double growth_exponent = kNaN;
    /// Penalization sweeps: 2^{(p-1)/p} (C_theta ||zeta||_1 eps)^{1/p} + 4 tol^{1/p} for p >= 2.
    double derived_bound = kNaN;
    /// Penalization sweeps: 2^{-2/p} (C_theta ||f^-||_1)^{1/p} eps^{1/p}, the rate constant as stated (p >= 2); reported only.
    double stated_bound = kNaN;
};

enum class SweepKind { eps, s };
std::string_view to_string(SweepKind kind);

struct ReferenceSummary {
    double param = 0.0;
    double residual = 0.0;
    bool converged = false;
    long sweeps = 0;
    std::vector<double> free_boundary;
    std::vector<Interval> coincidence;
};

struct SweepReport {
    SweepKind kind = SweepKind::s;
    std::string catalog_id;
    std::map<std::string, double> fixed;
    std::map<std::string, std::string> settings;
    std::vector<MetricRow> rows;
    std::map<std::string, RateFit> rate_fits;
    ReferenceSummary reference;

    [[nodiscard]] bool all_converged() const;
};

/**
 * Penalized solves for each eps against the obstacle solve at the same (s, p).
 * wr_diff is [u_eps - u]_{s,p}, or ||(u_eps - u)'||_p when s = 1.
 * Throws ConfigError unless eps_list is nonempty and strictly decreasing.
 */
SweepReport run_eps_sweep(const ProblemSpec& problem, double s, double p, std::span<const double> eps_list,
                          const StudyOptions& opts);

/**
 * Obstacle solves for each s against the reference at sigma (the local operator
 * when sigma = 1). wr_diff is [u^s - u^sigma]_{r,p}.
 * Throws ConfigError unless s_list is nonempty, strictly increasing inside
 * (0, 0.95], and 0 <= r < sigma <= 1.
 */
SweepReport run_s_sweep(const ProblemSpec& problem, double p, std::span<const double> s_list, double sigma,
                        double r, const StudyOptions& opts);

struct BbmRow {
    double s = 0.0;
    double quadrature_power = kNaN;
    double gradient_power = 0.0;
    double rel_gap = kNaN;
    bool ok = false;
};

struct BbmTable {
    CatalogFn fn = CatalogFn::bump;
    double p = 2.0;
    std::vector<BbmRow> rows;

    [[nodiscard]] double final_gap() const { return rows.empty() ? kNaN : rows.back().rel_gap; }
};

/// [u]_{s,p}^p by quadrature next to ||u'||_p^p for each s.
BbmTable bbm_check(CatalogFn fn, double p, std::span<const double> s_list, double rel_tol);

/// True when last < first and at most one interior step goes up.
bool decreasing_trend(std::span<const double> values);

} // namespace nlobs
