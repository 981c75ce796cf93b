#include <doctest.h>

#include "hjn/variational.hpp"
#include "hjn/weak_kam.hpp"

using namespace hjn;

// the parallel kernels must reproduce the serial reference bit for bit

namespace {
struct Threads {
  explicit Threads(int n) { set_threads(n); }
  ~Threads() { set_threads(1); }
};
}  // namespace

TEST_CASE("parallel: Scheme::apply") {
  Threads t(4);
  auto g = build_grid(Domain::disc({0, 0}, 1), 0.04);
  auto u = sample_field(g, [](Vec p) { return std::sin(3 * p.x) * p.y + 0.2 * p.x; }).values;
  for (auto kind : {ProblemKind::cn, ProblemKind::dbc})
    for (auto flux : {Flux::godunov, Flux::lax_friedrichs}) {
      auto B = BoundaryModel::affine(1.0, 0.4, Expr::constant(0.1));
      Scheme s(g, Hamiltonian::double_well(), B, kind, {flux, 0.5, Exec::serial});
      Scheme p(g, Hamiltonian::double_well(), B, kind, {flux, 0.5, Exec::parallel});
      CHECK(s.apply(u) == p.apply(u));
    }
}

TEST_CASE("parallel: semi-Lagrangian steps") {
  Threads t(4);
  auto g = build_grid(Domain::disc({0, 0}, 1), 0.05);
  auto H = Hamiltonian::quadratic(1.0, Expr::parse("x*y", {"x", "y"}));
  auto B = BoundaryModel::affine(1.0, 0.3, Expr::constant(0.2));
  auto cs = make_control_set(*g, H, B, 17, 4);
  ObliqueSelection sel(B, 2, 0.05);
  auto u = sample_field(g, [](Vec p) { return p.x - p.y * p.y; }).values;
  double dt = 2 * g->h() / cs.v_max;
  CHECK(dp_step_cn(*g, u, H, sel, cs, dt, Exec::serial) == dp_step_cn(*g, u, H, sel, cs, dt, Exec::parallel));
  ValueTable tb;
  tb.grid = g;
  tb.kind = ProblemKind::dbc;
  tb.dt = dt;
  tb.times = {0.0, dt};
  tb.values = {u, dp_step_cn(*g, u, H, sel, cs, dt, Exec::serial)};
  CHECK(dp_step_dbc(tb, H, sel, cs, Exec::serial) == dp_step_dbc(tb, H, sel, cs, Exec::parallel));
}

TEST_CASE("parallel: value tables") {
  Threads t(3);
  auto g = build_grid(Domain::interval(0, 1), 0.02);
  auto u0 = sample_field(g, [](Vec p) { return p.x; });
  ValueOptions a, b;
  a.exec = Exec::serial;
  b.exec = Exec::parallel;
  auto B = BoundaryModel::affine(1.0, 0.0, Expr::constant(-0.5));
  for (auto kind : {ProblemKind::cn, ProblemKind::dbc})
    CHECK(value(u0, Hamiltonian::double_well(), B, kind, 0.3, a).values ==
          value(u0, Hamiltonian::double_well(), B, kind, 0.3, b).values);
}

TEST_CASE("parallel: action matrix") {
  Threads t(4);
  auto g = build_grid(Domain::disc({0, 0}, 1), 0.15);
  ActionMetric m(g, Hamiltonian::quadratic(1.0, Expr::parse("-0.5*(x^2+y^2)", {"x", "y"})),
                 BoundaryModel::neumann());
  auto s = action_matrix(m, {}, Exec::serial);
  auto p = action_matrix(m, {}, Exec::parallel);
  CHECK(s.sources == p.sources);
  CHECK(s.d == p.d);
}
