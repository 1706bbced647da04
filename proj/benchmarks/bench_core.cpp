#include <benchmark/benchmark.h>

#include <vector>

#include "platelab/discretize.hpp"
#include "platelab/eigensolve.hpp"
#include "platelab/geometry.hpp"

using namespace platelab;

namespace {

GridDomain square(int N) { return build_rectangle(1.0, 1.0, N, N); }

void BM_assemble_clamped(benchmark::State& state) {
  GridDomain d = square(int(state.range(0)));
  TensorField f = identity_field();
  for (auto _ : state) {
    SparseSymMatrix A = assemble_clamped(d, f);
    benchmark::DoNotOptimize(A.values.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(d.interior_count()));
}
BENCHMARK(BM_assemble_clamped)->Arg(32)->Arg(64)->Arg(128);

void BM_matvec(benchmark::State& state) {
  GridDomain d = square(int(state.range(0)));
  SparseSymMatrix A = assemble_clamped(d, identity_field());
  std::vector<double> x(A.order, 1.0), y(A.order);
  for (auto _ : state) {
    A.matvec(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * A.order);
}
BENCHMARK(BM_matvec)->Arg(64)->Arg(128)->Arg(256);

void BM_precond_apply(benchmark::State& state) {
  int N = int(state.range(0));
  GridDomain d = square(N);
  SparseSymMatrix K = assemble_L(d, identity_field());
  Preconditioner M = second_order_preconditioner(K, N);
  std::vector<double> r(K.order, 1.0), z(K.order);
  for (auto _ : state) {
    M(r.data(), z.data(), K.order);
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(BM_precond_apply)->Arg(32)->Arg(64);

void BM_lobpcg(benchmark::State& state) {
  int N = int(state.range(0));
  GridDomain d = square(N);
  SparseSymMatrix K = assemble_L(d, identity_field());
  SparseSymMatrix A = assemble_clamped(d, identity_field());
  LobpcgOptions opt;
  opt.preconditioner = second_order_preconditioner(K, N);
  for (auto _ : state) {
    EigenSystem sys = lobpcg(A, 4, 1e-6, 600, 7, d.cell_weight(), opt);
    benchmark::DoNotOptimize(sys.eigenvalues.data());
  }
}
BENCHMARK(BM_lobpcg)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_dense_eig(benchmark::State& state) {
  GridDomain d = square(int(state.range(0)));
  SparseSymMatrix A = assemble_clamped(d, identity_field());
  for (auto _ : state) {
    EigenSystem sys = dense_eig(A, d.cell_weight());
    benchmark::DoNotOptimize(sys.eigenvalues.data());
  }
}
BENCHMARK(BM_dense_eig)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
