#pragma once

// Dense row kernels behind the nonlocal operator. Every kernel exists twice:
// `serial::` is the plain reference loop kept for testing, `parallel::` is the
// OpenMP version used by the library. Parallel reductions are formed from
// per-row partial sums added in row order, so results do not depend on the
// thread count.

#include <algorithm>
#include <cmath>
#include <span>

namespace nlobs {

/**
 * Evaluates |t|^p, Phi_p(t) = |t|^{p-2} t and (p-1)|t|^{p-2}.
 *
 * With delta > 0 the smoothed family (t^2 + delta^2)^{p/2} - delta^p,
 * t (t^2 + delta^2)^{(p-2)/2} and its derivative is evaluated instead; the
 * solvers use it for continuation when p < 2.
 */
class PowerLaw {
public:
    explicit PowerLaw(double p, double delta = 0.0);

    [[nodiscard]] double exponent() const { return p_; }
    [[nodiscard]] double delta() const { return delta_; }

    [[nodiscard]] double abs_pow(double t) const
    {
        const double a = std::abs(t);
        switch (kind_) {
        case Kind::smoothed: return std::pow(t * t + delta_ * delta_, 0.5 * p_) - std::pow(delta_, p_);
        case Kind::two: return a * a;
        case Kind::three: return a * a * a;
        case Kind::four: return (a * a) * (a * a);
        case Kind::three_halves: return a * std::sqrt(a);
        default: return a == 0.0 ? 0.0 : std::pow(a, p_);
        }
    }

    [[nodiscard]] double phi(double t) const
    {
        switch (kind_) {
        case Kind::smoothed: return t * std::pow(t * t + delta_ * delta_, 0.5 * p_ - 1.0);
        case Kind::two: return t;
        case Kind::three: return std::abs(t) * t;
        case Kind::four: return t * t * t;
        case Kind::three_halves: return std::copysign(std::sqrt(std::abs(t)), t);
        default: return t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), p_ - 1.0), t);
        }
    }

    /// Derivative of phi with |t| floored at `floor` (phi' is singular at 0 for p < 2).
    [[nodiscard]] double phi_prime(double t, double floor) const
    {
        const double a = std::max(std::abs(t), floor);
        switch (kind_) {
        case Kind::smoothed: {
            const double r2 = t * t + delta_ * delta_;
            return std::pow(r2, 0.5 * p_ - 2.0) * ((p_ - 1.0) * t * t + delta_ * delta_);
        }
        case Kind::two: return 1.0;
        case Kind::three: return 2.0 * a;
        case Kind::four: return 3.0 * a * a;
        case Kind::three_halves: return 0.5 / std::sqrt(a);
        default: return (p_ - 1.0) * std::pow(a, p_ - 2.0);
        }
    }

private:
    enum class Kind { two, three, four, three_halves, general, smoothed };
    double p_;
    double delta_;
    Kind kind_;
};

namespace kernels {

/// Read-only view of assembled pair weights over n interior nodes.
struct PairView {
    std::span<const double> k;     // n*n, row-major, zero diagonal
    std::span<const double> tails; // n
    int n = 0;
    double h = 0.0;
    double coef = 0.0;             // operator prefactor 2(1-s)C_{1,p}
};

namespace serial {

/// k_ij = near(|i-j|) * (|i-j| h)^{-(1+sp)}, tails from both ends of (a+h/2, b-h/2).
void assemble(int n_cells, double h, double sp, double near_factor, std::span<double> k,
              std::span<double> tails);

/// out_i = coef [ sum_j h k_ij Phi(u_i - u_j) + T_i Phi(u_i) ].
void apply(const PairView& w, const PowerLaw& pw, std::span<const double> u, std::span<double> out);

/// sum_{i != j} h^2 k_ij |u_i - u_j|^p + 2 sum_i h T_i |u_i|^p.
double pair_sum(const PairView& w, const PowerLaw& pw, std::span<const double> u);

/// Hessian of the energy divided by h, dense n*n.
void hessian(const PairView& w, const PowerLaw& pw, std::span<const double> u, double floor,
             std::span<double> out);

} // namespace serial

namespace parallel {

void assemble(int n_cells, double h, double sp, double near_factor, std::span<double> k,
              std::span<double> tails);
void apply(const PairView& w, const PowerLaw& pw, std::span<const double> u, std::span<double> out);
double pair_sum(const PairView& w, const PowerLaw& pw, std::span<const double> u);
void hessian(const PairView& w, const PowerLaw& pw, std::span<const double> u, double floor,
             std::span<double> out);

} // namespace parallel

} // namespace kernels
} // namespace nlobs
