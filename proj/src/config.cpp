#include "nlobstacle/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nlobstacle/error.hpp"

namespace nlobs {

namespace {

std::string_view trim(std::string_view v)
{
    const auto first = v.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = v.find_last_not_of(" \t\r");
    return v.substr(first, last - first + 1);
}

// Drops a trailing " # comment" that is not inside quotes.
std::string_view strip_comment(std::string_view v)
{
    bool quoted = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == '"') {
            quoted = !quoted;
        } else if (!quoted && v[i] == '#' && (i == 0 || v[i - 1] == ' ' || v[i - 1] == '\t')) {
            return trim(v.substr(0, i));
        }
    }
    return trim(v);
}

std::string as_string(const std::string& key, std::string_view raw)
{
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        return std::string(raw.substr(1, raw.size() - 2));
    }
    if (raw.empty()) {
        throw ConfigError(key + ": empty value");
    }
    return std::string(raw);
}

double as_number(const std::string& key, std::string_view raw)
{
    raw = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size() || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + std::string(raw) + "'");
    }
    return v;
}

long long as_integer(const std::string& key, std::string_view raw)
{
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw ConfigError(key + ": expected an integer, got '" + std::string(raw) + "'");
    }
    return v;
}

bool as_bool(const std::string& key, std::string_view raw)
{
    if (raw == "true") {
        return true;
    }
    if (raw == "false") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + std::string(raw) + "'");
}

std::vector<double> as_list(const std::string& key, std::string_view raw)
{
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
        throw ConfigError(key + ": expected a list like [0.1, 0.2], got '" + std::string(raw) + "'");
    }
    std::vector<double> out;
    std::string_view body = trim(raw.substr(1, raw.size() - 2));
    while (!body.empty()) {
        const auto comma = body.find(',');
        out.push_back(as_number(key, body.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        body = trim(body.substr(comma + 1));
    }
    return out;
}

int as_int(const std::string& key, std::string_view raw)
{
    const long long v = as_integer(key, raw);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(key + ": integer out of range");
    }
    return static_cast<int>(v);
}

using Setter = std::function<void(RunConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table{
        {"domain.a", [](RunConfig& c, const std::string& k, std::string_view v) { c.a = as_number(k, v); }},
        {"domain.b", [](RunConfig& c, const std::string& k, std::string_view v) { c.b = as_number(k, v); }},
        {"grid.n_cells", [](RunConfig& c, const std::string& k, std::string_view v) { c.n_cells = as_int(k, v); }},
        {"frac.s", [](RunConfig& c, const std::string& k, std::string_view v) { c.s = as_number(k, v); }},
        {"frac.p", [](RunConfig& c, const std::string& k, std::string_view v) { c.p = as_number(k, v); }},
        {"problem.catalog",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.catalog = as_string(k, v); }},
        {"problem.tol_u", [](RunConfig& c, const std::string& k, std::string_view v) { c.tol_u = as_number(k, v); }},
        {"solver.tol", [](RunConfig& c, const std::string& k, std::string_view v) { c.solver.tol = as_number(k, v); }},
        {"solver.max_sweeps",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.solver.max_sweeps = as_integer(k, v); }},
        {"solver.max_newton",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.solver.max_newton = as_int(k, v); }},
        {"solver.method",
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.solver.method = parse_solver_method(as_string(k, v));
         }},
        {"solver.nested",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.solver.nested = as_bool(k, v); }},
        {"solver.theta_variant",
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.theta = parse_theta_variant(as_string(k, v));
         }},
        {"solver.warm_start",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.warm_start = as_bool(k, v); }},
        {"operator.near_field",
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.near_field = parse_near_field(as_string(k, v));
         }},
        {"penalty.eps", [](RunConfig& c, const std::string& k, std::string_view v) { c.eps = as_number(k, v); }},
        {"penalty.eps_list",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.eps_list = as_list(k, v); }},
        {"study.s_list", [](RunConfig& c, const std::string& k, std::string_view v) { c.s_list = as_list(k, v); }},
        {"study.sigma", [](RunConfig& c, const std::string& k, std::string_view v) { c.sigma = as_number(k, v); }},
        {"study.r", [](RunConfig& c, const std::string& k, std::string_view v) { c.r = as_number(k, v); }},
        {"study.window_policy",
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.window_policy = parse_window_policy(as_string(k, v));
         }},
        {"study.holder_beta",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.holder_beta = as_number(k, v); }},
        {"check.seed",
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const long long seed = as_integer(k, v);
             if (seed < 0) {
                 throw ConfigError(k + ": must be nonnegative");
             }
             c.seed = static_cast<std::uint64_t>(seed);
         }},
        {"check.bbm_fn",
         [](RunConfig& c, const std::string& k, std::string_view v) {
             try {
                 c.bbm_fn = parse_catalog_fn(as_string(k, v));
             } catch (const ConfigError& e) {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
        {"check.bbm_s_list",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.bbm_s_list = as_list(k, v); }},
        {"check.bbm_rel_tol",
         [](RunConfig& c, const std::string& k, std::string_view v) { c.bbm_rel_tol = as_number(k, v); }},
        {"output.format",
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.format = parse_report_format(as_string(k, v));
         }},
        {"output.dir", [](RunConfig& c, const std::string& k, std::string_view v) { c.out_dir = as_string(k, v); }},
    };
    return table;
}

bool strictly_increasing(const std::vector<double>& v)
{
    return std::adjacent_find(v.begin(), v.end(), [](double l, double r) { return !(l < r); }) == v.end();
}

} // namespace

double RunConfig::r_or_default() const
{
    if (r) {
        return *r;
    }
    return sigma == 1.0 ? 0.5 : sigma - 0.2;
}

StudyOptions RunConfig::study_options() const
{
    StudyOptions o;
    o.solver = solver;
    o.theta = theta;
    o.warm_start = warm_start;
    o.near_field = near_field;
    o.tol_u = tol_u;
    o.holder_beta = holder_beta;
    o.window_policy = window_policy;
    return o;
}

void RunConfig::validate() const
{
    (void)build_grid(a, b, n_cells);
    if (s) {
        (void)make_params(*s, p);
    } else {
        (void)make_params(1.0, p);
    }
    if (catalog.empty()) {
        throw ConfigError("problem.catalog: missing (expected CAT-A, CAT-B, CAT-C or CAT-D)");
    }
    (void)catalog_problem(catalog, build_grid(a, b, n_cells));
    if (tol_u < 0.0) {
        throw ConfigError("problem.tol_u: must be nonnegative (0 selects the default)");
    }
    solver.validate();
    if (eps && !(*eps > 0.0)) {
        throw ConfigError("penalty.eps must be a positive number");
    }
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0) || (k > 0 && !(eps_list[k] < eps_list[k - 1]))) {
            throw ConfigError("penalty.eps_list: entries must be positive and strictly decreasing");
        }
    }
    if (!strictly_increasing(s_list) ||
        std::any_of(s_list.begin(), s_list.end(), [](double v) { return !(v > 0.0 && v <= 0.95); })) {
        throw ConfigError("study.s_list: entries must lie in (0, 0.95] and strictly increase");
    }
    if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw ConfigError("study.sigma: must lie in (0, 1]");
    }
    const double rr = r_or_default();
    if (!(rr >= 0.0 && rr < sigma)) {
        throw ConfigError("study.r: must satisfy 0 <= r < sigma");
    }
    if (!(holder_beta > 0.0 && holder_beta <= 1.0)) {
        throw ConfigError("study.holder_beta: must lie in (0, 1]");
    }
    if (!strictly_increasing(bbm_s_list) ||
        std::any_of(bbm_s_list.begin(), bbm_s_list.end(), [](double v) { return !(v > 0.0 && v < 1.0); })) {
        throw ConfigError("check.bbm_s_list: entries must lie in (0, 1) and strictly increase");
    }
    if (!(bbm_rel_tol > 0.0)) {
        throw ConfigError("check.bbm_rel_tol: must be positive");
    }
    if (out_dir.empty()) {
        throw ConfigError("output.dir: must not be empty");
    }
}

RunConfig parse_config(std::string_view text, std::string_view origin)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string(origin) + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig cfg;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(std::string(origin) + ": key '" + section + "' must sit inside a [section]");
        }
        for (const auto& [name, leaf] : body) {
            const std::string key = section + "." + name;
            const auto it = table.find(key);
            if (it == table.end()) {
                throw ConfigError(std::string(origin) + ": unknown key '" + key + "'");
            }
            const std::string raw = leaf.data();
            it->second(cfg, key, strip_comment(raw));
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

} // namespace nlobs
