#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "nlobstacle/free_boundary.hpp"
#include "nlobstacle/harness.hpp"
#include "nlobstacle/solvers.hpp"

namespace nlobs {

enum class ReportFormat { csv, json, both };

/// Accepts "csv", "json", "both"; throws ConfigError otherwise.
ReportFormat parse_report_format(std::string_view name);

/// Exact CSV column order of a sweep report.
inline constexpr std::string_view kSweepCsvHeader =
    "param,sup_diff,lp_diff,wr_diff,d_L,d_H_coin,d_H_fb,theta_gap_1,theta_gap_2,ls_residual,holder_beta,sweeps";

/// `{catalog}_{kind}_{p}_{sigma}.{ext}`; numbers use the shortest %g form.
std::string report_filename(std::string_view catalog, std::string_view kind, double p, double sigma,
                            std::string_view ext);

std::string sweep_csv(const SweepReport& report);
std::string sweep_json(const SweepReport& report);

/// A solve plus the derived sets that the CLI reports next to it.
struct SolveSummary {
    const SolveReport* report = nullptr;
    std::string kind; ///< "vi" or "penalized"
    double tol_u = 0.0;
    CoincidenceSet coincidence;
    FreeBoundary free_boundary;
    double complementarity = 0.0;
    double lewy_stampacchia = 0.0;
};

/// Nodal table index,x,u,operator.
std::string solve_csv(const SolveSummary& summary);
/// One JSON object holding every summary passed in (keyed by kind).
std::string solve_json(std::span<const SolveSummary> summaries);

std::string bbm_csv(const BbmTable& table);

/// Writes text to path, creating parent directories; IoError names the path on failure.
void write_text(const std::filesystem::path& path, std::string_view text);

} // namespace nlobs
