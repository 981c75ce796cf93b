#include <doctest.h>

#include <cmath>
#include <random>

#include "hjn/scheme.hpp"

using namespace hjn;

namespace {
PointBoundary frozen(const BoundaryModel& B, Vec x, Vec n, int dim) { return B.at(x, n, dim); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("LF numerical Hamiltonian: consistency and formula") {
  auto H = Hamiltonian::quadratic(1.0);
  CHECK(interior_numerical_hamiltonian(H, {0, 0}, {0.7, 0}, {0.7, 0}, {3, 3}, 1) == H({0, 0}, {0.7, 0}));
  CHECK(interior_numerical_hamiltonian(H, {0, 0}, {0, 0}, {2, 0}, {2, 2}, 1) == doctest::Approx(-1.5));
}

TEST_CASE("LF numerical Hamiltonian: monotone on 1000 random tuples") {
  auto H = Hamiltonian::double_well();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  // sigma covers |dH/dp| on the reachable box |p| <= 1.6 * sqrt 2
  double s = H.lipschitz(1.6 * std::sqrt(2.0));
  for (int k = 0; k < 1000; ++k) {
    Vec pm{U(rng), U(rng)}, pp{U(rng), U(rng)};
    double v = interior_numerical_hamiltonian(H, {0, 0}, pm, pp, {s, s}, 2);
    CHECK(interior_numerical_hamiltonian(H, {0, 0}, pm, pp + Vec{0.1, 0}, {s, s}, 2) <= v + 1e-12);
    CHECK(interior_numerical_hamiltonian(H, {0, 0}, pm, pp + Vec{0, 0.1}, {s, s}, 2) <= v + 1e-12);
    CHECK(interior_numerical_hamiltonian(H, {0, 0}, pm + Vec{0.1, 0}, pp, {s, s}, 2) >= v - 1e-12);
  }
}

TEST_CASE("Godunov Hamiltonian: consistency and monotonicity against brute force") {
  RadialProfile dw({1.0, 0.0, -2.0, 0.0, 1.0});
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  const int n = 1000;
  const double lip = dw.max_slope(1.5 * std::sqrt(2.0));
  for (int k = 0; k < 60; ++k) {
    Vec p{U(rng), U(rng)};
    CHECK(godunov_hamiltonian(dw, p, p, 2) == doctest::Approx(dw(norm(p))));
    Vec pm{U(rng), U(rng)}, pp{U(rng), U(rng)};
    // oracle: ext over p_x of ext over p_y on a dense lattice; sampling error <= lip * (dx + dy)
    auto ext = [](bool mn, double a, double b) { return mn ? std::min(a, b) : std::max(a, b); };
    bool mx = pm.x <= pp.x, my = pm.y <= pp.y;
    double outer = mx ? 1e300 : -1e300;
    for (int i = 0; i <= n; ++i) {
      double px = pm.x + (pp.x - pm.x) * i / n;
      double inner = my ? 1e300 : -1e300;
      for (int j = 0; j <= n; ++j) inner = ext(my, inner, dw(std::hypot(px, pm.y + (pp.y - pm.y) * j / n)));
      outer = ext(mx, outer, inner);
    }
    double tol = lip * (std::abs(pp.x - pm.x) + std::abs(pp.y - pm.y)) / n;
    double v = godunov_hamiltonian(dw, pm, pp, 2);
    CHECK(std::abs(v - outer) <= tol);
    CHECK(godunov_hamiltonian(dw, pm, pp + Vec{0.1, 0}, 2) <= v + 1e-12);
    CHECK(godunov_hamiltonian(dw, pm, pp + Vec{0, 0.1}, 2) <= v + 1e-12);
    CHECK(godunov_hamiltonian(dw, pm + Vec{0.1, 0}, pp, 2) >= v - 1e-12);
    CHECK(godunov_hamiltonian(dw, pm + Vec{0, 0.1}, pp, 2) >= v - 1e-12);
  }
}

TEST_CASE("ghost solve: homogeneous and inhomogeneous Neumann") {
  Vec n{0.6, 0.8}, t{-0.8 * 0.3, 0.6 * 0.3};
  CHECK(boundary_ghost_solve(frozen(BoundaryModel::neumann(), n, n, 2), n, t, 1.0, 1e-12) == doctest::Approx(0.0));
  CHECK(boundary_ghost_solve(frozen(BoundaryModel::neumann(Expr::constant(1)), n, n, 2), n, t, 1.0, 1e-12) ==
        doctest::Approx(1.0));
}

TEST_CASE("ghost solve: max(p.n - 1, 2p.n - 3) at the right endpoint, dense lambda scan") {
  auto B = frozen(BoundaryModel::max_affine({{1, 0, Expr::constant(1)}, {2, 0, Expr::constant(3)}}), {1, 0}, {1, 0}, 1);
  double lam = boundary_ghost_solve(B, {1, 0}, {0, 0}, 1.0, 1e-12);
  double scan = 0, best = 1e300;
  for (double l = -3; l <= 3; l += 1e-5)
    if (std::abs(B(Vec{l, 0})) < best) best = std::abs(B(Vec{l, 0})), scan = l;
  CHECK(lam == doctest::Approx(scan).epsilon(1e-4));
  CHECK(lam == doctest::Approx(1.0));
}

TEST_CASE("ghost solve: nonlinear user form by bisection") {
  auto B = BoundaryModel::user(Expr::parse("pn^3 + pn - 1", {"x", "y", "pn", "pt"}), 1.0, 10.0, false);
  auto pb = frozen(B, {1, 0}, {1, 0}, 1);
  double h = 0.01, theta = 1.0;
  double lam = boundary_ghost_solve(pb, {1, 0}, {0, 0}, 0.1, theta * h * h);
  CHECK(std::abs(pb(Vec{lam, 0})) <= theta * h * h);
  CHECK(lam == doctest::Approx(0.6823278).epsilon(1e-3));
}

TEST_CASE("step_cn: constants") {
  auto g = build_grid(Domain::disc({0, 0}, 1.0), 0.1);
  auto u0 = sample_field(g, [](Vec) { return 0.3; });
  auto u1 = step_cn(u0, Hamiltonian::quadratic(1.0), BoundaryModel::neumann(), 0.01);
  CHECK(u1.values == u0.values);
  auto H = Hamiltonian::quadratic(1.0, Expr::constant(0.7));
  auto u2 = step_cn(u0, H, BoundaryModel::neumann(), 0.01);
  for (double v : u2.values) CHECK(v == doctest::Approx(0.3 - 0.007).epsilon(1e-14));
}

TEST_CASE("step_dbc: affine B = p.n - 1 grows the boundary values at rate 1") {
  auto g = build_grid(Domain::interval(0, 1), 0.05);
  auto u0 = sample_field(g, [](Vec) { return 0.0; });
  auto u1 = step_dbc(u0, Hamiltonian::quadratic(1.0), BoundaryModel::neumann(Expr::constant(1)), 0.01);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(u1.values[i] == doctest::Approx(g->is_boundary(i) ? 0.01 : 0.0));
  auto u2 = step_dbc(u0, Hamiltonian::quadratic(1.0), BoundaryModel::neumann(), 0.01);
  CHECK(u2.values == u0.values);
}

TEST_CASE("step: CFL violation reports the admissible dt") {
  auto g = build_grid(Domain::interval(0, 1), 0.05);
  auto u0 = sample_field(g, [](Vec p) { return p.x; });
  Scheme s(g, Hamiltonian::eikonal(1.0), BoundaryModel::neumann(), ProblemKind::cn);
  try {
    s.step(u0.values, 1.0);
    FAIL("expected CflViolation");
  } catch (const CflViolation& e) {
    CHECK(e.admissible_dt == doctest::Approx(s.admissible_dt()));
    CHECK(e.admissible_dt < 1.0);
  }
}

TEST_CASE("evolve: T=0 gives one snapshot equal to u0") {
  auto g = build_grid(Domain::interval(0, 1), 0.05);
  auto u0 = sample_field(g, [](Vec p) { return std::sin(3 * p.x); });
  auto evo = evolve(u0, Hamiltonian::eikonal(1.0), BoundaryModel::neumann(), ProblemKind::cn, 0.0, 0.1);
  REQUIRE(evo.times.size() == 1);
  CHECK(evo.times[0] == 0.0);
  CHECK(evo.values[0] == u0.values);
}

TEST_CASE("evolve: eikonal Neumann against the Hopf-Lax oracle") {
  // u(x,t) = min_{|y-x| <= t, y in [0,1]} y = max(0, x - t)
  double h = 0.01;
  auto g = build_grid(Domain::interval(0, 1), h);
  auto u0 = sample_field(g, [](Vec p) { return p.x; });
  auto evo = evolve(u0, Hamiltonian::eikonal(1.0), BoundaryModel::neumann(), ProblemKind::cn, 1.5, 0.5);
  int k = evo.stamp(0.5);
  REQUIRE(k >= 0);
  double err = 0;
  for (std::size_t i = 0; i < g->size(); ++i)
    err = std::max(err, std::abs(evo.values[k][i] - std::max(0.0, g->position(i).x - 0.5)));
  CHECK(err <= 0.05);
  for (double v : evo.values.back()) CHECK(std::abs(v) <= 2 * h);
}

TEST_CASE("evolve: contraction and comparison") {
  auto g = build_grid(Domain::interval(0, 1), 0.02);
  auto a = sample_field(g, [](Vec p) { return std::sin(5 * p.x); });
  auto b = sample_field(g, [](Vec p) { return std::sin(5 * p.x) + 0.2 + 0.1 * std::cos(7 * p.x); });
  auto H = Hamiltonian::double_well();
  auto B = BoundaryModel::neumann(Expr::constant(0.3));
  EvolveOptions o;
  auto ea = evolve(a, H, B, ProblemKind::cn, 1.0, 0.1, o);
  o.dt = ea.dt;
  auto eb = evolve(b, H, B, ProblemKind::cn, 1.0, 0.1, o);
  double d0 = sup_diff(a.values, b.values), prev = d0;
  for (std::size_t k = 0; k < ea.times.size(); ++k) {
    double d = sup_diff(ea.values[k], eb.values[k]);
    CHECK(d <= prev * (1 + 1e-14));
    prev = d;
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(ea.values[k][i] <= eb.values[k][i]);
  }
}

TEST_CASE("evolve: bounded time increments for Lipschitz data") {
  // the increment u^{n+1}-u^n is itself contracted by the monotone scheme, so it never exceeds the first one
  auto g = build_grid(Domain::disc({0, 0}, 1.0), 0.1);
  auto u0 = sample_field(g, [](Vec p) { return std::abs(p.x) - 0.5 * p.y; });
  std::vector<double> incs;
  std::vector<double> last = u0.values;
  EvolveOptions o;
  o.on_step = [&](double, const std::vector<double>& u) {
    incs.push_back(sup_diff(u, last));
    last = u;
  };
  evolve(u0, Hamiltonian::quadratic(1.0), BoundaryModel::neumann(), ProblemKind::cn, 0.5, 0.5, o);
  REQUIRE(incs.size() > 10);
  for (double d : incs) CHECK(d <= incs.front() * (1 + 1e-9) + 1e-15);
}

TEST_CASE("scheme: interior consistency is first order") {
  auto H = Hamiltonian::double_well();
  auto err = [&](double h) {
    auto g = build_grid(Domain::interval(0, 1), h);
    Scheme s(g, H, BoundaryModel::neumann(), ProblemKind::cn);
    auto u = sample_field(g, [](Vec p) { return 0.4 * std::sin(2 * M_PI * p.x); });
    auto F = s.apply(u.values);
    double e = 0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (g->is_boundary(i)) continue;
      double x = g->position(i).x;
      e = std::max(e, std::abs(F[i] - H({x, 0}, {0.8 * M_PI * std::cos(2 * M_PI * x), 0})));
    }
    return e;
  };
  double e1 = err(0.02), e2 = err(0.01);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("scheme: 1-D Jacobian agrees with central differences on a generic field") {
  auto g = build_grid(Domain::interval(0, 1), 0.05);
  auto H = Hamiltonian::double_well();
  for (auto kind : {ProblemKind::cn, ProblemKind::dbc}) {
    Scheme s(g, H, BoundaryModel::affine(1.3, 0, Expr::constant(0.2)), kind);
    auto u = sample_field(g, [](Vec p) { return 0.37 * std::sin(7.1 * p.x) + 0.11 * p.x * p.x; }).values;
    for (std::size_t i = 0; i < g->size(); ++i) {
      int cols[3];
      double vals[3];
      int n = s.node_jacobian_1d(i, u, cols, vals);
      for (int k = 0; k < n; ++k) {
        auto up = u, dn = u;
        double d = 1e-7;
        up[cols[k]] += d;
        dn[cols[k]] -= d;
        double fd = (s.node(i, up) - s.node(i, dn)) / (2 * d);
        CHECK(vals[k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}
