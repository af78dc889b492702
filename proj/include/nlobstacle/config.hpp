#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlobstacle/harness.hpp"
#include "nlobstacle/quadrature.hpp"
#include "nlobstacle/report.hpp"

namespace nlobs {

/**
 * One run, fully described by a sectioned key = value file:
 *
 *   [frac]
 *   s = 0.5
 *   p = 2
 *   [problem]
 *   catalog = "CAT-B"
 *
 * Values are numbers, true/false, quoted or bare strings, or [a, b, c] lists.
 * Lines starting with # or ; are comments, as is anything after " #".
 */
struct RunConfig {
    double a = -1.0;
    double b = 1.0;
    int n_cells = 1024;

    std::optional<double> s;
    double p = 2.0;

    std::string catalog;
    /// <= 0 means the per-solution default threshold.
    double tol_u = 0.0;

    SolverOptions solver;
    ThetaVariant theta = ThetaVariant::ramp;
    bool warm_start = true;
    NearField near_field = NearField::zeta_corrected;

    std::optional<double> eps;
    std::vector<double> eps_list;

    std::vector<double> s_list;
    double sigma = 1.0;
    std::optional<double> r;
    WindowPolicy window_policy = WindowPolicy::automatic;
    double holder_beta = 0.1;

    std::uint64_t seed = 42;
    CatalogFn bbm_fn = CatalogFn::bump;
    std::vector<double> bbm_s_list{0.9, 0.99, 0.999};
    double bbm_rel_tol = 1e-6;

    ReportFormat format = ReportFormat::both;
    std::string out_dir = "out";

    /// r if given, else 0.5 for sigma = 1 and sigma - 0.2 otherwise.
    [[nodiscard]] double r_or_default() const;
    [[nodiscard]] StudyOptions study_options() const;

    /// Checks every field that does not depend on the command; throws ConfigError.
    void validate() const;
};

/// Throws ConfigError naming the offending key (unknown keys included).
RunConfig parse_config(std::string_view text, std::string_view origin = "config");
/// Throws IoError if the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

} // namespace nlobs
