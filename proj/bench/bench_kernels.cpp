// Serial versus OpenMP kernels on the paper_fig2 Hamiltonian.
//   bench_kernels --benchmark_filter=spmv
// Argument: mechanical truncation; the cavity truncation is two thirds of it.

#include <benchmark/benchmark.h>

#include <vector>

#include "oemsync/kernels.hpp"
#include "oemsync/model.hpp"

using namespace oemsync;

namespace {

SparseOperator hamiltonian(Index n_mech) {
  const SpaceConfig s = SpaceConfig::make(n_mech, std::max<Index>(2, 2 * n_mech / 3));
  return build_static_hamiltonian(ModelParams::paper_fig2(), s);
}

template <kernels::Exec E>
void spmv(benchmark::State& state) {
  const SparseOperator h = hamiltonian(state.range(0));
  const Index d = h.dim();
  std::vector<Complex> x(d, Complex(1.0, 0.5)), y(d);
  for (auto _ : state) {
    kernels::spmv(E, h, Complex(0, -1), x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(h.nnz()));
}

template <kernels::Exec E>
void spmm(benchmark::State& state) {
  const SparseOperator h = hamiltonian(state.range(0));
  const DenseMatrix x = DenseMatrix::Constant(h.dim(), h.dim(), Complex(0.1, 0.2));
  DenseMatrix y = DenseMatrix::Zero(h.dim(), h.dim());
  for (auto _ : state) {
    kernels::spmm(E, h, Complex(0, -1), x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <kernels::Exec E>
void add_adjoint(benchmark::State& state) {
  const Index d = hamiltonian(state.range(0)).dim();
  DenseMatrix m = DenseMatrix::Constant(d, d, Complex(0.1, 0.2));
  for (auto _ : state) {
    kernels::add_adjoint_in_place(E, m);
    m *= 0.5;
    benchmark::DoNotOptimize(m.data());
  }
}

}  // namespace

BENCHMARK(spmv<kernels::Exec::serial>)->Arg(6)->Arg(15)->Arg(30);
BENCHMARK(spmv<kernels::Exec::parallel>)->Arg(6)->Arg(15)->Arg(30);
BENCHMARK(spmm<kernels::Exec::serial>)->Arg(6)->Arg(15);
BENCHMARK(spmm<kernels::Exec::parallel>)->Arg(6)->Arg(15);
BENCHMARK(add_adjoint<kernels::Exec::serial>)->Arg(6)->Arg(15);
BENCHMARK(add_adjoint<kernels::Exec::parallel>)->Arg(6)->Arg(15);

BENCHMARK_MAIN();
