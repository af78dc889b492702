#include "nlobstacle/operator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "nlobstacle/error.hpp"

namespace nlobs {
namespace {

// |t| floor for phi' in Hessians: the search direction only, never the residual.
double derivative_floor(std::span<const double> u)
{
    double m = 0.0;
    for (double v : u) {
        m = std::max(m, std::abs(v));
    }
    return 1e-9 * (1.0 + m);
}

// Factorizes in place, so m is garbage afterwards; callers rebuild it before retrying.
bool factor_and_solve(Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, Eigen::VectorXd& x)
{
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(m);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    x = llt.solve(rhs);
    return x.allFinite();
}

} // namespace

double EnergyOperator::energy_norm(std::span<const double> v) const
{
    const double e = energy(v);
    return std::pow(std::max(e, 0.0) * params_.p, 1.0 / params_.p);
}

void EnergyOperator::require_grid(const GridFunction& u) const
{
    if (u.empty() || !u.grid().same_as(*grid_)) {
        throw ShapeError("operator: grid function does not live on the operator's grid");
    }
}

GridFunction EnergyOperator::apply(const GridFunction& u) const
{
    require_grid(u);
    GridFunction out(grid_);
    apply(u.interior(), out.interior());
    return out;
}

double EnergyOperator::energy(const GridFunction& u) const
{
    require_grid(u);
    return energy(u.interior());
}

double EnergyOperator::energy_norm(const GridFunction& v) const
{
    require_grid(v);
    return energy_norm(v.interior());
}

// ---------------------------------------------------------------------------

NonlocalOperator::NonlocalOperator(KernelWeights weights)
    : NonlocalOperator(std::make_shared<const KernelWeights>(std::move(weights)), 0.0)
{
}

NonlocalOperator::NonlocalOperator(std::shared_ptr<const KernelWeights> weights, double delta)
    : EnergyOperator(weights->grid, weights->params, delta),
      weights_(std::move(weights)),
      coef_((1.0 - weights_->params.s) * 2.0 * weights_->params.C_1p)
{
}

std::unique_ptr<EnergyOperator> NonlocalOperator::smoothed(double delta) const
{
    return std::make_unique<NonlocalOperator>(weights_, delta);
}

kernels::PairView NonlocalOperator::view() const
{
    return kernels::PairView{weights_->k, weights_->tails, weights_->n, grid_->h, coef_};
}

void NonlocalOperator::apply(std::span<const double> u, std::span<double> out) const
{
    kernels::parallel::apply(view(), power_, u, out);
}

double NonlocalOperator::energy(std::span<const double> u) const
{
    const double seminorm_p = (1.0 - params_.s) * params_.C_1p *
                              kernels::parallel::pair_sum(view(), power_, u);
    return seminorm_p / params_.p;
}

RowValue NonlocalOperator::row(int r, double t, std::span<const double> u) const
{
    const int n = weights_->n;
    const double* k = weights_->k.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(n);
    double value = 0.0;
    double slope = 0.0;
    constexpr double floor = 1e-300;
    for (int j = 0; j < n; ++j) {
        if (j == r) {
            continue;
        }
        const double d = t - u[static_cast<std::size_t>(j)];
        value += k[j] * power_.phi(d);
        slope += k[j] * power_.phi_prime(d, floor);
    }
    const double tail = weights_->tails[static_cast<std::size_t>(r)];
    value = grid_->h * value + tail * power_.phi(t);
    slope = grid_->h * slope + tail * power_.phi_prime(t, floor);
    return {coef_ * value, coef_ * slope};
}

void NonlocalOperator::hessian_diagonal(std::span<const double> u, std::span<double> out) const
{
    const int n = weights_->n;
    const double floor = derivative_floor(u);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* k = weights_->k.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n);
        const double ui = u[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            acc += k[j] * power_.phi_prime(ui - u[static_cast<std::size_t>(j)], floor);
        }
        out[static_cast<std::size_t>(i)] =
            coef_ * (grid_->h * acc + weights_->tails[static_cast<std::size_t>(i)] *
                                          power_.phi_prime(ui, floor));
    }
}

bool NonlocalOperator::newton_direction(std::span<const double> u, std::span<const char> free_mask,
                                        std::span<const double> extra_diag,
                                        std::span<const double> rhs, std::span<double> dir) const
{
    const int n = weights_->n;
    std::vector<int> free;
    free.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        dir[static_cast<std::size_t>(i)] = 0.0;
        if (free_mask[static_cast<std::size_t>(i)] != 0) {
            free.push_back(i);
        }
    }
    const int m = static_cast<int>(free.size());
    if (m == 0) {
        return true;
    }
    const double floor = derivative_floor(u);
    std::vector<double> diag(static_cast<std::size_t>(n));
    hessian_diagonal(u, diag);

    auto build = [&](Eigen::MatrixXd& mat) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < m; ++c) {
            const int j = free[static_cast<std::size_t>(c)];
            const double* k =
                weights_->k.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(n);
            const double uj = u[static_cast<std::size_t>(j)];
            for (int r = 0; r < m; ++r) {
                const int i = free[static_cast<std::size_t>(r)];
                mat(r, c) = (i == j) ? diag[static_cast<std::size_t>(i)] +
                                           extra_diag[static_cast<std::size_t>(i)]
                                     : -coef_ * grid_->h * k[i] *
                                           power_.phi_prime(u[static_cast<std::size_t>(i)] - uj, floor);
            }
        }
    };

    Eigen::MatrixXd mat(m, m);
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) {
        b(r) = rhs[static_cast<std::size_t>(free[static_cast<std::size_t>(r)])];
    }
    Eigen::VectorXd x;
    double shift = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        build(mat);
        if (shift > 0.0) {
            mat.diagonal().array() += shift;
        }
        if (factor_and_solve(mat, b, x)) {
            for (int r = 0; r < m; ++r) {
                dir[static_cast<std::size_t>(free[static_cast<std::size_t>(r)])] = x(r);
            }
            return true;
        }
        double dmax = 0.0;
        for (int i : free) {
            dmax = std::max(dmax, std::abs(diag[static_cast<std::size_t>(i)]));
        }
        shift = (shift == 0.0) ? 1e-12 * std::max(dmax, 1.0) : shift * 100.0;
    }
    return false;
}

std::unique_ptr<EnergyOperator> NonlocalOperator::on_grid(GridPtr other) const
{
    return std::make_unique<NonlocalOperator>(
        assemble_weights(std::move(other), params_, weights_->near_field));
}

// ---------------------------------------------------------------------------

LocalOperator::LocalOperator(GridPtr grid, double p, double delta)
    : EnergyOperator(std::move(grid), make_params(1.0, p), delta)
{
}

std::unique_ptr<EnergyOperator> LocalOperator::smoothed(double delta) const
{
    return std::make_unique<LocalOperator>(grid_, params_.p, delta);
}

void LocalOperator::apply(std::span<const double> u, std::span<double> out) const
{
    const int n = interior_count();
    const double h = grid_->h;
    double left_flux = power_.phi(u[0] / h);
    for (int i = 0; i < n; ++i) {
        const double right = (i + 1 < n) ? u[static_cast<std::size_t>(i + 1)] : 0.0;
        const double right_flux = power_.phi((right - u[static_cast<std::size_t>(i)]) / h);
        out[static_cast<std::size_t>(i)] = -(right_flux - left_flux) / h;
        left_flux = right_flux;
    }
}

double LocalOperator::energy(std::span<const double> u) const
{
    const int n = interior_count();
    const double h = grid_->h;
    double acc = 0.0;
    double prev = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double cur = (i < n) ? u[static_cast<std::size_t>(i)] : 0.0;
        acc += h * power_.abs_pow((cur - prev) / h);
        prev = cur;
    }
    return acc / params_.p;
}

RowValue LocalOperator::row(int r, double t, std::span<const double> u) const
{
    const int n = interior_count();
    const double h = grid_->h;
    const double left = (r > 0) ? u[static_cast<std::size_t>(r - 1)] : 0.0;
    const double right = (r + 1 < n) ? u[static_cast<std::size_t>(r + 1)] : 0.0;
    const double dl = (t - left) / h;
    const double dr = (right - t) / h;
    constexpr double floor = 1e-300;
    return {-(power_.phi(dr) - power_.phi(dl)) / h,
            (power_.phi_prime(dr, floor) + power_.phi_prime(dl, floor)) / (h * h)};
}

void LocalOperator::hessian_diagonal(std::span<const double> u, std::span<double> out) const
{
    const int n = interior_count();
    const double h = grid_->h;
    const double floor = derivative_floor(u) / h;
    double w_left = power_.phi_prime(u[0] / h, floor);
    for (int i = 0; i < n; ++i) {
        const double right = (i + 1 < n) ? u[static_cast<std::size_t>(i + 1)] : 0.0;
        const double w_right = power_.phi_prime((right - u[static_cast<std::size_t>(i)]) / h, floor);
        out[static_cast<std::size_t>(i)] = (w_left + w_right) / (h * h);
        w_left = w_right;
    }
}

bool LocalOperator::newton_direction(std::span<const double> u, std::span<const char> free_mask,
                                     std::span<const double> extra_diag,
                                     std::span<const double> rhs, std::span<double> dir) const
{
    const int n = interior_count();
    const double h = grid_->h;
    const double floor = derivative_floor(u) / h;
    // Edge weights w_e for edges e = 0..n between nodes e-1 and e (interior indexing).
    std::vector<double> edge(static_cast<std::size_t>(n) + 1);
    for (int e = 0; e <= n; ++e) {
        const double lo = (e > 0) ? u[static_cast<std::size_t>(e - 1)] : 0.0;
        const double hi = (e < n) ? u[static_cast<std::size_t>(e)] : 0.0;
        edge[static_cast<std::size_t>(e)] = power_.phi_prime((hi - lo) / h, floor) / (h * h);
    }
    // Thomas algorithm; fixed rows become identity rows with zero right-hand side.
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> lower(static_cast<std::size_t>(n), 0.0);
    std::vector<double> upper(static_cast<std::size_t>(n), 0.0);
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (free_mask[ui] == 0) {
            diag[ui] = 1.0;
            b[ui] = 0.0;
            continue;
        }
        diag[ui] = edge[ui] + edge[ui + 1] + extra_diag[ui];
        b[ui] = rhs[ui];
        if (i > 0 && free_mask[ui - 1] != 0) {
            lower[ui] = -edge[ui];
        }
        if (i + 1 < n && free_mask[ui + 1] != 0) {
            upper[ui] = -edge[ui + 1];
        }
    }
    for (int i = 1; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (lower[ui] == 0.0) {
            continue;
        }
        const double factor = lower[ui] / diag[ui - 1];
        diag[ui] -= factor * upper[ui - 1];
        b[ui] -= factor * b[ui - 1];
        if (!(diag[ui] > 0.0)) {
            return false;
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        const auto ui = static_cast<std::size_t>(i);
        double v = b[ui];
        if (i + 1 < n) {
            v -= upper[ui] * dir[ui + 1];
        }
        dir[ui] = (free_mask[ui] != 0) ? v / diag[ui] : 0.0;
    }
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(dir[static_cast<std::size_t>(i)])) {
            return false;
        }
    }
    return true;
}

std::unique_ptr<EnergyOperator> LocalOperator::on_grid(GridPtr other) const
{
    return std::make_unique<LocalOperator>(std::move(other), params_.p);
}

// ---------------------------------------------------------------------------

std::unique_ptr<EnergyOperator> make_operator(GridPtr grid, const FractionalParams& params,
                                              NearField near_field)
{
    if (params.is_local()) {
        return std::make_unique<LocalOperator>(std::move(grid), params.p);
    }
    return std::make_unique<NonlocalOperator>(assemble_weights(std::move(grid), params, near_field));
}

namespace {

void require_weights_grid(const KernelWeights& w, const GridFunction& u, const char* what)
{
    if (u.empty() || !u.grid().same_as(*w.grid)) {
        throw ShapeError(std::string(what) + ": grid function does not match the kernel grid");
    }
}

kernels::PairView view_of(const KernelWeights& w, double coef)
{
    return kernels::PairView{w.k, w.tails, w.n, w.grid->h, coef};
}

} // namespace

GridFunction apply_operator(const KernelWeights& w, const GridFunction& u)
{
    require_weights_grid(w, u, "apply_operator");
    GridFunction out(w.grid);
    const double coef = 2.0 * (1.0 - w.params.s) * w.params.C_1p;
    kernels::parallel::apply(view_of(w, coef), PowerLaw(w.params.p), u.interior(), out.interior());
    return out;
}

double energy(const KernelWeights& w, const GridFunction& u)
{
    return std::pow(gagliardo_seminorm(w, u).value, w.params.p) / w.params.p;
}

GridFunction local_p_laplacian(const Grid& grid, double p, const GridFunction& u)
{
    if (u.empty() || !u.grid().same_as(grid)) {
        throw ShapeError("local_p_laplacian: grid function does not match the grid");
    }
    LocalOperator op(u.grid_ptr(), p);
    return op.apply(u);
}

double local_energy(const Grid& grid, double p, const GridFunction& u)
{
    if (u.empty() || !u.grid().same_as(grid)) {
        throw ShapeError("local_energy: grid function does not match the grid");
    }
    LocalOperator op(u.grid_ptr(), p);
    return op.energy(u);
}

SeminormValue gagliardo_seminorm(const KernelWeights& w, const GridFunction& v)
{
    require_weights_grid(w, v, "gagliardo_seminorm");
    const double sum = kernels::parallel::pair_sum(view_of(w, 0.0), PowerLaw(w.params.p), v.interior());
    const double value_p = (1.0 - w.params.s) * w.params.C_1p * sum;
    return {w.params.s, w.params.p, std::pow(std::max(value_p, 0.0), 1.0 / w.params.p)};
}

SeminormValue gagliardo_seminorm(GridPtr grid, double order_r, double p, const GridFunction& v,
                                 NearField near_field)
{
    if (!(order_r >= 0.0) || order_r >= 1.0) {
        throw DomainError("gagliardo_seminorm: order r must lie in [0, 1); use gradient_norm for r = 1");
    }
    if (v.empty() || !v.grid().same_as(*grid)) {
        throw ShapeError("gagliardo_seminorm: grid function does not match the grid");
    }
    if (order_r == 0.0) {
        const PowerLaw pw(p);
        double acc = 0.0;
        for (double x : v.interior()) {
            acc += pw.abs_pow(x);
        }
        return {0.0, p, std::pow(grid->h * acc, 1.0 / p)};
    }
    const KernelWeights w = assemble_weights(std::move(grid), make_params(order_r, p), near_field);
    return gagliardo_seminorm(w, v);
}

double gradient_norm(const Grid& grid, double p, const GridFunction& v)
{
    if (v.empty() || !v.grid().same_as(grid)) {
        throw ShapeError("gradient_norm: grid function does not match the grid");
    }
    const PowerLaw pw(p);
    const auto inner = v.interior();
    double acc = 0.0;
    double prev = 0.0;
    const int n = grid.n_cells - 1;
    for (int i = 0; i <= n; ++i) {
        const double cur = (i < n) ? inner[static_cast<std::size_t>(i)] : 0.0;
        acc += grid.h * pw.abs_pow((cur - prev) / grid.h);
        prev = cur;
    }
    return std::pow(acc, 1.0 / p);
}

} // namespace nlobs
