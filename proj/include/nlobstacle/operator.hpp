#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nlobstacle/grid.hpp"
#include "nlobstacle/kernels.hpp"
#include "nlobstacle/weights.hpp"

namespace nlobs {

struct SeminormValue {
    double order_r = 0.0;
    double p = 2.0;
    double value = 0.0;
};

/// Value of one operator row as a function of the nodal unknown, and its slope.
struct RowValue {
    double value = 0.0;
    double slope = 0.0;
};

/**
 * A discrete p-Laplacian (nonlocal for s < 1, local for s = 1) seen as the
 * gradient of a convex energy: apply(u) == grad energy(u) / h.
 *
 * The span-based interface works on interior values only (length n_cells - 1);
 * the Dirichlet nodes are implicitly zero.
 */
class EnergyOperator {
public:
    EnergyOperator(GridPtr grid, FractionalParams params, double delta = 0.0)
        : grid_(std::move(grid)), params_(params), power_(params.p, delta)
    {
    }
    virtual ~EnergyOperator() = default;

    EnergyOperator(const EnergyOperator&) = delete;
    EnergyOperator& operator=(const EnergyOperator&) = delete;

    [[nodiscard]] const Grid& grid() const { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const { return grid_; }
    [[nodiscard]] const FractionalParams& params() const { return params_; }
    [[nodiscard]] const PowerLaw& power() const { return power_; }
    [[nodiscard]] int interior_count() const { return grid_->n_cells - 1; }

    virtual void apply(std::span<const double> u, std::span<double> out) const = 0;
    [[nodiscard]] virtual double energy(std::span<const double> u) const = 0;

    /// Row r of apply() with u_r replaced by t; used by nodewise solvers.
    [[nodiscard]] virtual RowValue row(int r, double t, std::span<const double> u) const = 0;

    /// Diagonal of the energy Hessian divided by h.
    virtual void hessian_diagonal(std::span<const double> u, std::span<double> out) const = 0;

    /**
     * Solves (H + diag(extra))_{FF} dir_F = rhs_F where H is the energy Hessian
     * divided by h at u and F = {free_mask != 0}; dir is zero off F.
     * Returns false if the reduced matrix could not be factorized.
     */
    [[nodiscard]] virtual bool newton_direction(std::span<const double> u,
                                                std::span<const char> free_mask,
                                                std::span<const double> extra_diag,
                                                std::span<const double> rhs,
                                                std::span<double> dir) const = 0;

    /// Same operator family and parameters on another grid.
    [[nodiscard]] virtual std::unique_ptr<EnergyOperator> on_grid(GridPtr other) const = 0;

    /// Same operator with the flux Phi_p replaced by its delta-smoothing (see PowerLaw).
    [[nodiscard]] virtual std::unique_ptr<EnergyOperator> smoothed(double delta) const = 0;

    /// (p * energy)^{1/p}: the Gagliardo seminorm [v]_{s,p}, or ||v'||_p for s = 1.
    [[nodiscard]] double energy_norm(std::span<const double> v) const;

    [[nodiscard]] GridFunction apply(const GridFunction& u) const;
    [[nodiscard]] double energy(const GridFunction& u) const;
    [[nodiscard]] double energy_norm(const GridFunction& v) const;

protected:
    void require_grid(const GridFunction& u) const;

    GridPtr grid_;
    FractionalParams params_;
    PowerLaw power_;
};

class NonlocalOperator final : public EnergyOperator {
public:
    explicit NonlocalOperator(KernelWeights weights);
    NonlocalOperator(std::shared_ptr<const KernelWeights> weights, double delta);

    [[nodiscard]] const KernelWeights& weights() const { return *weights_; }
    /// Operator prefactor 2 (1 - s) C_{1,p}.
    [[nodiscard]] double coefficient() const { return coef_; }

    void apply(std::span<const double> u, std::span<double> out) const override;
    [[nodiscard]] double energy(std::span<const double> u) const override;
    [[nodiscard]] RowValue row(int r, double t, std::span<const double> u) const override;
    void hessian_diagonal(std::span<const double> u, std::span<double> out) const override;
    [[nodiscard]] bool newton_direction(std::span<const double> u, std::span<const char> free_mask,
                                        std::span<const double> extra_diag,
                                        std::span<const double> rhs,
                                        std::span<double> dir) const override;
    [[nodiscard]] std::unique_ptr<EnergyOperator> on_grid(GridPtr other) const override;
    [[nodiscard]] std::unique_ptr<EnergyOperator> smoothed(double delta) const override;

    [[nodiscard]] kernels::PairView view() const;

    using EnergyOperator::apply;
    using EnergyOperator::energy;

private:
    std::shared_ptr<const KernelWeights> weights_;
    double coef_;
};

class LocalOperator final : public EnergyOperator {
public:
    LocalOperator(GridPtr grid, double p, double delta = 0.0);

    void apply(std::span<const double> u, std::span<double> out) const override;
    [[nodiscard]] double energy(std::span<const double> u) const override;
    [[nodiscard]] RowValue row(int r, double t, std::span<const double> u) const override;
    void hessian_diagonal(std::span<const double> u, std::span<double> out) const override;
    [[nodiscard]] bool newton_direction(std::span<const double> u, std::span<const char> free_mask,
                                        std::span<const double> extra_diag,
                                        std::span<const double> rhs,
                                        std::span<double> dir) const override;
    [[nodiscard]] std::unique_ptr<EnergyOperator> on_grid(GridPtr other) const override;
    [[nodiscard]] std::unique_ptr<EnergyOperator> smoothed(double delta) const override;

    using EnergyOperator::apply;
    using EnergyOperator::energy;
};

/// Nonlocal operator for s < 1, local p-Laplacian for s = 1.
std::unique_ptr<EnergyOperator> make_operator(GridPtr grid, const FractionalParams& params,
                                              NearField near_field = NearField::zeta_corrected);

/// Fractional p-Laplacian of a grid function; boundary nodes are treated as zero.
GridFunction apply_operator(const KernelWeights& w, const GridFunction& u);

/// J(u) = [u]_{s,p}^p / p with the same weights.
double energy(const KernelWeights& w, const GridFunction& u);

/// Three-point p-Laplacian -(Phi(D+ u) - Phi(D- u)) / h.
GridFunction local_p_laplacian(const Grid& grid, double p, const GridFunction& u);

/// (1/p) sum_edges h |(u_{i+1} - u_i)/h|^p.
double local_energy(const Grid& grid, double p, const GridFunction& u);

/// Discrete [v]_{s,p} with the order taken from the weights.
SeminormValue gagliardo_seminorm(const KernelWeights& w, const GridFunction& v);

/// Discrete [v]_{r,p}; r = 0 gives (h sum |v_i|^p)^{1/p}. Throws DomainError for r >= 1.
SeminormValue gagliardo_seminorm(GridPtr grid, double order_r, double p, const GridFunction& v,
                                 NearField near_field = NearField::zeta_corrected);

/// ||v'||_{L^p} of the piecewise-linear interpolant.
double gradient_norm(const Grid& grid, double p, const GridFunction& v);

} // namespace nlobs
