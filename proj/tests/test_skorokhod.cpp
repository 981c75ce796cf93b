#include <doctest.h>

#include <cmath>
#include <random>

#include "hjn/skorokhod.hpp"

using namespace hjn;

TEST_CASE("skorokhod: zero control") {
  auto dom = Domain::disc({0, 0}, 1.0);
  auto sel = oblique_selection(BoundaryModel::neumann(), 2, 0.05);
  auto tr = integrate(dom, sel, {0.3, -0.2}, [](double) { return Vec{}; }, 1.0, 0.01);
  for (auto& e : tr.eta) CHECK(e == Vec{0.3, -0.2});
  for (double l : tr.l) CHECK(l == 0.0);
  for (double f : tr.f) CHECK(f == 0.0);
}

TEST_CASE("skorokhod: 1-D sticking against the closed form") {
  // eta(t) = min(0.5 + t, 1); l = 1 once stuck; f = l g
  auto dom = Domain::interval(0, 1);
  double g = 0.25;
  auto B = BoundaryModel::neumann(Expr::constant(g));
  auto sel = oblique_selection(B, 1, 0.05);
  double dt = 1.0 / 64;
  auto tr = integrate(dom, sel, {0.5, 0}, [](double) { return Vec{1, 0}; }, 1.0, dt);
  REQUIRE(tr.steps() == 64);
  for (std::size_t k = 0; k <= tr.steps(); ++k)
    CHECK(std::abs(tr.eta[k].x - std::min(0.5 + tr.times[k], 1.0)) <= 1e-10);
  for (std::size_t k = 0; k < tr.steps(); ++k) {
    double oracle = tr.times[k] >= 0.5 ? 1.0 : 0.0;
    CHECK(std::abs(tr.l[k] - oracle) <= 1e-10);
    CHECK(tr.f[k] == doctest::Approx(tr.l[k] * g).epsilon(1e-12));
  }
  auto rep = verify_bounds(tr, dom, B.theta(), B.lipschitz());
  CHECK(rep.ok());
  CHECK(std::abs(rep.max_l_ratio - 1.0) <= 1e-10);
  auto f = cost_track(tr, dom, B);
  for (std::size_t k = 0; k < tr.steps(); ++k) CHECK(f[k] == doctest::Approx(tr.l[k] * g).epsilon(1e-9));
}

TEST_CASE("skorokhod: interior-only run has ratios <= 1 and zero cost") {
  auto dom = Domain::disc({0, 0}, 1.0);
  auto B = BoundaryModel::affine(1.0, 0.5, Expr::constant(0.3));
  auto sel = oblique_selection(B, 2, 0.05);
  auto tr = integrate(dom, sel, {0, 0}, [](double t) { return Vec{0.3 * std::cos(t), 0.3 * std::sin(t)}; }, 2.0, 0.01);
  auto rep = verify_bounds(tr, dom, B.theta(), B.lipschitz());
  CHECK(rep.ok());
  CHECK(rep.max_l_ratio == 0.0);
  CHECK(rep.max_speed_ratio <= 1.0 + 1e-12);
  for (double f : cost_track(tr, dom, B)) CHECK(f == 0.0);
}

TEST_CASE("skorokhod: random oblique runs keep containment, complementarity and bounds") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(-1, 1), A(0.6, 1.5), Bt(-0.6, 0.6);
  auto dom = Domain::disc({0, 0}, 1.0);
  for (int r = 0; r < 20; ++r) {
    auto B = BoundaryModel::affine(A(rng), Bt(rng), Expr::parse("0.2 + 0.1*x", {"x", "y"}));
    auto sel = oblique_selection(B, 2, 0.05);
    Vec v0{2 * U(rng), 2 * U(rng)};
    double w = 3 * U(rng);
    auto tr = integrate(dom, sel, {0.5 * U(rng), 0.5 * U(rng)},
                        [&](double t) { return Vec{v0.x * std::cos(w * t), v0.y + std::sin(w * t)}; }, 2.0, 1e-3);
    auto rep = verify_bounds(tr, dom, B.theta(), B.lipschitz());
    CHECK(rep.violations.empty());
    CHECK(rep.max_rho <= 1e-10);
    CHECK(rep.complementarity == 0.0);
    // discrete (i:2-5): f >= (v - eta_dot).p - l B(eta, p) on sampled p
    for (std::size_t k = 0; k < tr.steps(); k += 37) {
      if (tr.l[k] == 0.0) continue;
      Vec x = tr.eta[k + 1], n = dom.normal(x), xi = tr.v[k] - tr.eta_dot(k);
      for (double px = -3; px <= 3; px += 0.5)
        for (double py = -3; py <= 3; py += 0.5)
          CHECK(tr.f[k] >= dot(xi, {px, py}) - tr.l[k] * B(x, n, {px, py}) - 1e-9);
    }
  }
}

TEST_CASE("skorokhod: obliqueness failure is reported") {
  // gamma = (-0.5, 1) in (n, tau) coordinates points into the domain
  auto bad = BoundaryModel::user(Expr::parse("-0.5*pn + pt", {"x", "y", "pn", "pt"}), 1.0, 2.0, true);
  auto sel = oblique_selection(bad, 2, 0.05);
  auto dom = Domain::disc({0, 0}, 1.0);
  CHECK_THROWS_AS(integrate(dom, sel, {0.9, 0}, [](double) { return Vec{1, 0}; }, 0.5, 0.01), NumericalError);
}

TEST_CASE("skorokhod: first-order convergence under dt refinement") {
  auto dom = Domain::disc({0, 0}, 1.0);
  auto B = BoundaryModel::affine(1.0, 0.6, Expr::constant(0.0));
  auto sel = oblique_selection(B, 2, 0.05);
  auto v = [](double) { return Vec{1.0, 0.3}; };
  double T = 1.0, dt = 1.0 / 100;
  auto ref = integrate(dom, sel, {0, 0}, v, T, dt / 8);
  auto err = [&](double d) {
    auto tr = integrate(dom, sel, {0, 0}, v, T, d);
    int ratio = static_cast<int>(std::lround(d / (dt / 8)));
    double e = 0;
    for (std::size_t k = 0; k <= tr.steps(); ++k) e = std::max(e, norm(tr.eta[k] - ref.eta[k * ratio]));
    return e;
  };
  double e1 = err(dt), e2 = err(dt / 2);
  CHECK(e1 <= 10 * dt);
  CHECK(e2 < e1);
  CHECK(e1 / e2 >= 1.5);
}

TEST_CASE("skorokhod: cost from G never exceeds the selection cost for a two-affine max") {
  auto dom = Domain::interval(-1, 1);
  auto B = BoundaryModel::max_affine({{1, 0, Expr::constant(0.2)}, {2, 0, Expr::constant(0.5)}});
  auto sel = oblique_selection(B, 1, 0.05);
  auto tr = integrate(dom, sel, {0, 0}, [](double t) { return Vec{t < 1.5 ? 1.0 : -1.0, 0}; }, 3.0, 0.01);
  auto f = cost_track(tr, dom, B);
  double active = 0;
  for (std::size_t k = 0; k < tr.steps(); ++k) {
    CHECK(f[k] <= tr.f[k] + 1e-9);
    active += tr.l[k];
  }
  CHECK(active > 0);
}
