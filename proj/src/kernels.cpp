#include "nlobstacle/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace nlobs {

PowerLaw::PowerLaw(double p, double delta) : p_(p), delta_(delta), kind_(Kind::general)
{
    if (delta > 0.0 && p != 2.0) {
        kind_ = Kind::smoothed;
    } else if (p == 2.0) {
        kind_ = Kind::two;
    } else if (p == 3.0) {
        kind_ = Kind::three;
    } else if (p == 4.0) {
        kind_ = Kind::four;
    } else if (p == 1.5) {
        kind_ = Kind::three_halves;
    }
}

namespace kernels {
namespace {

inline std::size_t at(int i, int j, int n)
{
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
}

inline double tail_value(int node, int n_cells, double h, double sp)
{
    const double left = (node - 0.5) * h;
    const double right = (n_cells - node - 0.5) * h;
    return (std::pow(left, -sp) + std::pow(right, -sp)) / sp;
}

inline double pair_weight(int distance, double h, double sp, double near_factor)
{
    const double w = std::pow(distance * h, -(1.0 + sp));
    return distance == 1 ? near_factor * w : w;
}

} // namespace

namespace serial {

void assemble(int n_cells, double h, double sp, double near_factor, std::span<double> k,
              std::span<double> tails)
{
    const int n = n_cells - 1;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            k[at(i, j, n)] = (i == j) ? 0.0 : pair_weight(std::abs(i - j), h, sp, near_factor);
        }
        tails[static_cast<std::size_t>(i)] = tail_value(i + 1, n_cells, h, sp);
    }
}

void apply(const PairView& w, const PowerLaw& pw, std::span<const double> u, std::span<double> out)
{
    for (int i = 0; i < w.n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < w.n; ++j) {
            if (j != i) {
                acc += w.h * w.k[at(i, j, w.n)] * pw.phi(u[i] - u[j]);
            }
        }
        acc += w.tails[static_cast<std::size_t>(i)] * pw.phi(u[i]);
        out[static_cast<std::size_t>(i)] = w.coef * acc;
    }
}

double pair_sum(const PairView& w, const PowerLaw& pw, std::span<const double> u)
{
    double acc = 0.0;
    for (int i = 0; i < w.n; ++i) {
        for (int j = 0; j < w.n; ++j) {
            if (j != i) {
                acc += w.h * w.h * w.k[at(i, j, w.n)] * pw.abs_pow(u[i] - u[j]);
            }
        }
        acc += 2.0 * w.h * w.tails[static_cast<std::size_t>(i)] * pw.abs_pow(u[i]);
    }
    return acc;
}

void hessian(const PairView& w, const PowerLaw& pw, std::span<const double> u, double floor,
             std::span<double> out)
{
    for (int i = 0; i < w.n; ++i) {
        double diag = w.tails[static_cast<std::size_t>(i)] * pw.phi_prime(u[i], floor);
        for (int j = 0; j < w.n; ++j) {
            if (j == i) {
                continue;
            }
            const double c = w.h * w.k[at(i, j, w.n)] * pw.phi_prime(u[i] - u[j], floor);
            out[at(i, j, w.n)] = -w.coef * c;
            diag += c;
        }
        out[at(i, i, w.n)] = w.coef * diag;
    }
}

} // namespace serial

namespace parallel {

void assemble(int n_cells, double h, double sp, double near_factor, std::span<double> k,
              std::span<double> tails)
{
    const int n = n_cells - 1;
    // Weights depend on |i - j| only: evaluate each distance once.
    std::vector<double> by_distance(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (int d = 1; d < n; ++d) {
        by_distance[static_cast<std::size_t>(d)] = pair_weight(d, h, sp, near_factor);
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double* row = k.data() + at(i, 0, n);
        for (int j = 0; j < n; ++j) {
            row[j] = by_distance[static_cast<std::size_t>(std::abs(i - j))];
        }
        tails[static_cast<std::size_t>(i)] = tail_value(i + 1, n_cells, h, sp);
    }
}

void apply(const PairView& w, const PowerLaw& pw, std::span<const double> u, std::span<double> out)
{
#pragma omp parallel for schedule(static)
    for (int i = 0; i < w.n; ++i) {
        const double* row = w.k.data() + at(i, 0, w.n);
        const double ui = u[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (int j = 0; j < w.n; ++j) {
            // k_ii = 0 and Phi(0) = 0, so the diagonal contributes nothing.
            acc += row[j] * pw.phi(ui - u[static_cast<std::size_t>(j)]);
        }
        out[static_cast<std::size_t>(i)] =
            w.coef * (w.h * acc + w.tails[static_cast<std::size_t>(i)] * pw.phi(ui));
    }
}

double pair_sum(const PairView& w, const PowerLaw& pw, std::span<const double> u)
{
    std::vector<double> partial(static_cast<std::size_t>(w.n), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < w.n; ++i) {
        const double* row = w.k.data() + at(i, 0, w.n);
        const double ui = u[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (int j = i + 1; j < w.n; ++j) {
            acc += row[j] * pw.abs_pow(ui - u[static_cast<std::size_t>(j)]);
        }
        partial[static_cast<std::size_t>(i)] =
            2.0 * w.h * (w.h * acc + w.tails[static_cast<std::size_t>(i)] * pw.abs_pow(ui));
    }
    double total = 0.0;
    for (double v : partial) {
        total += v;
    }
    return total;
}

void hessian(const PairView& w, const PowerLaw& pw, std::span<const double> u, double floor,
             std::span<double> out)
{
#pragma omp parallel for schedule(static)
    for (int i = 0; i < w.n; ++i) {
        const double* row = w.k.data() + at(i, 0, w.n);
        double* hrow = out.data() + at(i, 0, w.n);
        const double ui = u[static_cast<std::size_t>(i)];
        double diag = 0.0;
        for (int j = 0; j < w.n; ++j) {
            const double c = w.h * row[j] * pw.phi_prime(ui - u[static_cast<std::size_t>(j)], floor);
            hrow[j] = -w.coef * c;
            diag += c;
        }
        hrow[i] = w.coef * (diag + w.tails[static_cast<std::size_t>(i)] * pw.phi_prime(ui, floor));
    }
}

} // namespace parallel
} // namespace kernels
} // namespace nlobs
