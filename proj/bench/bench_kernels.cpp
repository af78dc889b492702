// Serial reference kernels against the OpenMP ones, plus one end-to-end solve.
// Range argument is the number of cells.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "nlobstacle/kernels.hpp"
#include "nlobstacle/operator.hpp"
#include "nlobstacle/solvers.hpp"

namespace {

using namespace nlobs;

constexpr double s = 0.5;
constexpr double p = 3.0;

struct Fixture {
    int n_cells;
    int n;
    double h;
    std::vector<double> k;
    std::vector<double> tails;
    std::vector<double> u;
    std::vector<double> out;
    kernels::PairView view;
    PowerLaw pw{p};

    explicit Fixture(int cells)
        : n_cells(cells), n(cells - 1), h(2.0 / cells), k(static_cast<std::size_t>(n) * n), tails(n), u(n),
          out(static_cast<std::size_t>(n) * n)
    {
        kernels::serial::assemble(n_cells, h, s * p, near_field_factor(NearField::zeta_corrected, s, p), k, tails);
        for (int i = 0; i < n; ++i) {
            const double x = -1.0 + (i + 1) * h;
            u[static_cast<std::size_t>(i)] = std::max(0.0, 0.5 - x * x) + 0.1 * std::sin(7.0 * x);
        }
        view = {k, tails, n, h, 2.0 * (1.0 - s) * 0.5 * p};
    }
};

template <bool Parallel>
void assemble(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)));
    const double near = near_field_factor(NearField::zeta_corrected, s, p);
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::parallel::assemble(f.n_cells, f.h, s * p, near, f.k, f.tails);
        } else {
            kernels::serial::assemble(f.n_cells, f.h, s * p, near, f.k, f.tails);
        }
        benchmark::DoNotOptimize(f.k.data());
    }
}

template <bool Parallel>
void apply(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)));
    std::span<double> out(f.out.data(), static_cast<std::size_t>(f.n));
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::parallel::apply(f.view, f.pw, f.u, out);
        } else {
            kernels::serial::apply(f.view, f.pw, f.u, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void pair_sum(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        const double v = Parallel ? kernels::parallel::pair_sum(f.view, f.pw, f.u)
                                  : kernels::serial::pair_sum(f.view, f.pw, f.u);
        benchmark::DoNotOptimize(v);
    }
}

template <bool Parallel>
void hessian(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::parallel::hessian(f.view, f.pw, f.u, 1e-12, f.out);
        } else {
            kernels::serial::hessian(f.view, f.pw, f.u, 1e-12, f.out);
        }
        benchmark::DoNotOptimize(f.out.data());
    }
}

void solve_cat_b(benchmark::State& state)
{
    const GridPtr g = build_grid(-1.0, 1.0, static_cast<int>(state.range(0)));
    const ProblemSpec pr = catalog_problem("CAT-B", g);
    const auto op = make_operator(g, make_params(s, 2.0));
    for (auto _ : state) {
        const SolveReport rep = solve_vi(*op, pr, SolverOptions{});
        benchmark::DoNotOptimize(rep.residual);
    }
}

} // namespace

BENCHMARK(assemble<false>)->Name("assemble/serial")->Arg(512)->Arg(2048);
BENCHMARK(assemble<true>)->Name("assemble/omp")->Arg(512)->Arg(2048);
BENCHMARK(apply<false>)->Name("apply/serial")->Arg(512)->Arg(2048);
BENCHMARK(apply<true>)->Name("apply/omp")->Arg(512)->Arg(2048);
BENCHMARK(pair_sum<false>)->Name("pair_sum/serial")->Arg(512)->Arg(2048);
BENCHMARK(pair_sum<true>)->Name("pair_sum/omp")->Arg(512)->Arg(2048);
BENCHMARK(hessian<false>)->Name("hessian/serial")->Arg(512)->Arg(2048);
BENCHMARK(hessian<true>)->Name("hessian/omp")->Arg(512)->Arg(2048);
BENCHMARK(solve_cat_b)->Name("solve_vi/CAT-B")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
