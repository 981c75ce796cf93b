#include <doctest.h>

#include <cmath>
#include <random>

#include "hjn/weak_kam.hpp"

using namespace hjn;

namespace {
Hamiltonian cosine_well() {
  return Hamiltonian::quadratic(1.0, Expr::parse("cos(2*pi*(x-0.5)) - 1", {"x", "y"}));
}

// |int_{1/2}^{x} sqrt(2 (1 - cos(2 pi (s - 1/2)))) ds| by composite Simpson
double agmon(double x) {
  int n = 2000;
  double a = 0.5, b = x, hh = (b - a) / n, s = 0;
  auto f = [](double t) { return std::sqrt(2 * (1 - std::cos(2 * M_PI * (t - 0.5)))); };
  for (int k = 0; k <= n; ++k) s += f(a + k * hh) * (k == 0 || k == n ? 1 : (k % 2 ? 4 : 2));
  return std::abs(s * hh / 3);
}
}  // namespace

TEST_CASE("distance: eikonal Neumann is identically zero, mask is everything, u_inf = min u0") {
  auto g = build_grid(Domain::interval(0, 1), 0.05);
  ActionMetric m(g, Hamiltonian::eikonal(1.0), BoundaryModel::neumann());
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(m.rate(i) == 0.0);
  auto A = action_matrix(m);
  for (auto& col : A.d)
    for (double v : col) CHECK(v == 0.0);
  auto mask = aubry_set(A);
  for (char c : mask.mask) CHECK(c);
  CHECK_FALSE(mask.forced);
  auto u0 = sample_field(g, [](Vec p) { return std::cos(5 * p.x); });
  auto ui = asymptotic_profile(u0, A, mask);
  double mn = *std::min_element(u0.values.begin(), u0.values.end());
  for (double v : ui.values) CHECK(v == mn);
}

TEST_CASE("distance: cosine well matches the Agmon quadrature") {
  auto g = build_grid(Domain::interval(0, 1), 0.01);
  ActionMetric m(g, cosine_well(), BoundaryModel::neumann());
  int ys = g->nearest_node({0.5, 0});
  auto d = distance_from(m, ys);
  CHECK(d[ys] == 0.0);
  double dmax = agmon(0.0), worst = 0;
  for (std::size_t i = 0; i < g->size(); ++i) worst = std::max(worst, std::abs(d[i] - agmon(g->position(i).x)));
  CHECK(worst <= 0.02 * dmax);
}

TEST_CASE("action matrix: d(y,y)=0, triangle inequality, discrete subsolution") {
  auto g = build_grid(Domain::disc({0, 0}, 1), 0.2);
  auto H = Hamiltonian::quadratic(1.0, Expr::parse("-0.5*(x^2 + y^2)", {"x", "y"}));
  ActionMetric m(g, H, BoundaryModel::neumann());
  auto A = action_matrix(m);
  std::size_t N = g->size();
  for (std::size_t k = 0; k < N; ++k) CHECK(A.d[k][A.sources[k]] == 0.0);
  std::mt19937 rng(1);
  std::uniform_int_distribution<std::size_t> U(0, N - 1);
  for (int s = 0; s < 1000; ++s) {
    std::size_t x = U(rng), y = U(rng), z = U(rng);
    // d[k][x] = d(x, sources[k]) and sources are all nodes in order
    CHECK(A.d[z][x] <= A.d[y][x] + A.d[z][y] + 1e-12);
  }
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t i = 0; i < N; ++i)
      for (auto& e : m.edges(i)) CHECK(A.d[k][i] <= m.edge_cost(i, e) + A.d[k][e.to] + 1e-12);
}

TEST_CASE("aubry: cosine well localises at the maximum of W") {
  auto g = build_grid(Domain::interval(0, 1), 0.02);
  ActionMetric m(g, cosine_well(), BoundaryModel::neumann());
  auto A = action_matrix(m);
  auto mask = aubry_set(A);
  int count = 0;
  for (std::size_t i = 0; i < g->size(); ++i)
    if (mask.mask[i]) {
      ++count;
      CHECK(std::abs(g->position(i).x - 0.5) <= 2 * g->h());
    }
  CHECK(count >= 1);
  CHECK(mask.mask[g->nearest_node({0.5, 0})]);
}

TEST_CASE("asymptotic profile: a solution is reproduced") {
  auto g = build_grid(Domain::interval(0, 1), 0.02);
  ActionMetric m(g, cosine_well(), BoundaryModel::neumann());
  auto A = action_matrix(m);
  auto mask = aubry_set(A);
  int ys = g->nearest_node({0.5, 0});
  GridField u0{g, *A.column(ys)};
  auto ui = asymptotic_profile(u0, A, mask);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(ui.values[i] == doctest::Approx(u0.values[i]).epsilon(1e-12));
}

TEST_CASE("asymptotic profile: nested minimisation equals the triple minimum") {
  auto g = build_grid(Domain::interval(0, 1), 0.05);
  ActionMetric m(g, cosine_well(), BoundaryModel::neumann());
  auto A = action_matrix(m);
  auto mask = aubry_set(A);
  auto u0 = sample_field(g, [](Vec p) { return p.x; });
  auto ui = asymptotic_profile(u0, A, mask);
  std::size_t N = g->size();
  for (std::size_t x = 0; x < N; ++x) {
    double best = 1e300;
    for (std::size_t y = 0; y < N; ++y) {
      if (!mask.mask[y]) continue;
      for (std::size_t z = 0; z < N; ++z) best = std::min(best, A.d[y][x] + A.d[z][y] + u0.values[z]);
    }
    CHECK(ui.values[x] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("action metric: unnormalised models are rejected") {
  auto g = build_grid(Domain::interval(0, 1), 0.05);
  CHECK_THROWS_AS(ActionMetric(g, Hamiltonian::quadratic(1.0, Expr::constant(1.0)), BoundaryModel::neumann()),
                  NumericalError);
}

TEST_CASE("action matrix: refused for large grids without a source list") {
  auto g = build_grid(Domain::rectangle({0, 0}, {1, 1}), 0.02);
  ActionMetric m(g, Hamiltonian::eikonal(1.0), BoundaryModel::neumann());
  CHECK_THROWS_AS(action_matrix(m), Error);
  auto A = action_matrix(m, {0, 5});
  CHECK(A.d.size() == 2);
  CHECK(A.column(5) != nullptr);
  CHECK(A.column(6) == nullptr);
}

TEST_CASE("monotonicity: stationary run gives mu = 1") {
  auto g = build_grid(Domain::interval(0, 1), 0.1);
  auto v = sample_field(g, [](Vec p) { return std::sin(3 * p.x); });
  SpaceTimeField evo;
  evo.grid = g;
  evo.dt = 0.5;
  for (int k = 0; k <= 4; ++k) {
    evo.times.push_back(0.5 * k);
    std::vector<double> u = v.values;
    for (double& x : u) x += 2.0;
    evo.values.push_back(u);
  }
  auto tr = monotonicity_trace(evo, v, 0.1);
  CHECK(tr.shift == doctest::Approx(-1.0));
  for (std::size_t k = 0; k < tr.s.size(); ++k) {
    CHECK(tr.mu_plus[k] == 1.0);
    CHECK(tr.mu_minus[k] == 1.0);
  }
  // explicit shift too small for the normalisation 1 <= u - v + shift
  for (auto& u : evo.values)
    for (double& x : u) x -= 1.8;
  CHECK_THROWS_AS(monotonicity_trace(evo, v, 0.1, 0.3), Error);
}

TEST_CASE("monotonicity: bounds along a real run") {
  auto g = build_grid(Domain::interval(0, 1), 0.02);
  auto H = cosine_well();
  auto u0 = sample_field(g, [](Vec p) { return 0.3 * std::sin(2 * M_PI * p.x); });
  auto evo = evolve(u0, H, BoundaryModel::neumann(), ProblemKind::cn, 4.0, 0.5);
  auto v = sample_field(g, [](Vec) { return 0.0; });
  auto tr = monotonicity_trace(evo, v, 0.1, -1.0, true);
  for (std::size_t k = 0; k < tr.s.size(); ++k) {
    CHECK(tr.mu_plus[k] >= 0.0);
    CHECK(tr.mu_plus[k] <= 1.0);
    CHECK(tr.mu_minus[k] >= 1.0);
    for (std::size_t i = 0; i < g->size(); ++i) {
      CHECK(tr.node_mu_plus[k][i] >= tr.mu_plus[k]);
      CHECK(tr.node_mu_minus[k][i] <= tr.mu_minus[k]);
    }
  }
  CHECK(tr.C >= 1.0);
}
