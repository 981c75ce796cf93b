#include <benchmark/benchmark.h>

#include <cmath>

#include "hjn/variational.hpp"
#include "hjn/weak_kam.hpp"

using namespace hjn;

// serial reference vs OpenMP for each node kernel; range(0) selects Exec (0 serial, 1 parallel)

namespace {
Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

GridPtr disc(double h) { return build_grid(Domain::disc({0, 0}, 1.0), h); }
}  // namespace

static void BM_SchemeApply(benchmark::State& st) {
  auto g = disc(0.01);
  Scheme s(g, Hamiltonian::double_well(), BoundaryModel::affine(1.0, 0.3, Expr::constant(0.1)), ProblemKind::cn,
           {Flux::godunov, 0.5, exec_of(st)});
  auto u = sample_field(g, [](Vec p) { return std::sin(3 * p.x) * p.y; }).values;
  std::vector<double> out;
  for (auto _ : st) {
    s.apply(u, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g->size()));
}
BENCHMARK(BM_SchemeApply)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_DpStepCn(benchmark::State& st) {
  auto g = disc(0.03);
  auto H = Hamiltonian::quadratic(1.0, Expr::parse("-0.5*(x^2+y^2)", {"x", "y"}));
  auto B = BoundaryModel::affine(1.0, 0.3, Expr::constant(0.1));
  auto cs = make_control_set(*g, H, B);
  ObliqueSelection sel(B, 2, 0.05);
  auto u = sample_field(g, [](Vec p) { return p.x * p.x - p.y; }).values;
  double dt = 2 * g->h() / cs.v_max;
  for (auto _ : st) {
    auto next = dp_step_cn(*g, u, H, sel, cs, dt, exec_of(st));
    benchmark::DoNotOptimize(next.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g->size()));
}
BENCHMARK(BM_DpStepCn)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ActionMatrix(benchmark::State& st) {
  auto g = disc(0.08);
  ActionMetric m(g, Hamiltonian::quadratic(1.0, Expr::parse("-0.5*(x^2+y^2)", {"x", "y"})), BoundaryModel::neumann());
  for (auto _ : st) {
    auto A = action_matrix(m, {}, exec_of(st));
    benchmark::DoNotOptimize(A.d.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g->size()));
}
BENCHMARK(BM_ActionMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
