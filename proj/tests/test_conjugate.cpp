#include <doctest.h>

#include <cmath>
#include <random>

#include "hjn/conjugate.hpp"

using namespace hjn;

namespace {
const Vec kX{1, 0}, kN{1, 0};

double brute_sup(const std::function<double(double)>& f, double xi, double lo, double hi, double step) {
  double best = -1e300;
  for (double p = lo; p <= hi + 1e-12; p += step) best = std::max(best, xi * p - f(p));
  return best;
}
}  // namespace

TEST_CASE("lagrangian: quadratic is self-dual") {
  CHECK(lagrangian(Hamiltonian::quadratic(1.0), 1, {0, 0}, {1, 0}) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(lagrangian(Hamiltonian::quadratic(1.0), 2, {0, 0}, {0.6, 0.8}) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("lagrangian: eikonal conjugate is the indicator of the unit ball") {
  auto H = Hamiltonian::eikonal(1.0);
  CHECK(std::abs(lagrangian(H, 1, {0, 0}, {0.5, 0})) <= 1e-9);
  ConjugateOptions o;
  CHECK(lagrangian(H, 1, {0, 0}, {1.5, 0}, o) == o.cap);
}

TEST_CASE("lagrangian: double well at xi=2 against a dense p-scan") {
  auto H = Hamiltonian::double_well();
  double oracle = brute_sup([&](double p) { return H({0, 0}, {p, 0}); }, 2.0, -3.0, 3.0, 1e-4);
  CHECK(lagrangian(H, 1, {0, 0}, {2, 0}) == doctest::Approx(oracle).epsilon(1e-7));
  CHECK(lagrangian(H, 1, {0, 0}, {2, 0}) >= oracle - 1e-12);
}

TEST_CASE("lagrangian: matches the radial closed form and is convex in xi") {
  auto H = Hamiltonian::double_well().shifted(1.0);
  for (double s : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
    double L = lagrangian(H, 1, {0, 0}, {s, 0});
    CHECK(L == doctest::Approx(H.lagrangian_exact({0, 0}, {s, 0})).epsilon(1e-9));
  }
  for (double a = -2.0; a < 2.0; a += 0.25) {
    double b = a + 0.5;
    double la = lagrangian(H, 1, {0, 0}, {a, 0}), lb = lagrangian(H, 1, {0, 0}, {b, 0});
    double lm = lagrangian(H, 1, {0, 0}, {0.5 * (a + b), 0});
    CHECK(lm <= 0.5 * (la + lb) + 1e-9);
  }
}

TEST_CASE("lagrangian: radius too small is reported") {
  ConjugateOptions o;
  // maximiser p = 2 lies beyond 1.5 but inside the doubled check radius
  o.radius = 1.5;
  CHECK_THROWS_AS(lagrangian(Hamiltonian::quadratic(1.0), 1, {0, 0}, {2, 0}, o), NumericalError);
}

TEST_CASE("boundary conjugate: linear B") {
  auto B = BoundaryModel::neumann(Expr::constant(0.7));  // p.n - 0.7
  ConjugateOptions o;
  CHECK(boundary_conjugate(B, 1, kX, kN, {1, 0}) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(boundary_conjugate(B, 1, kX, kN, {1.2, 0}, o) == o.cap);
  CHECK(boundary_conjugate(BoundaryModel::neumann(), 1, kX, kN, kN) == doctest::Approx(0.0));
}

TEST_CASE("boundary conjugate: max of two affine forms against brute force") {
  auto B = BoundaryModel::max_affine({{1, 0, Expr::constant(1)}, {2, 0, Expr::constant(3)}});
  auto f = [&](double p) { return B(kX, kN, {p, 0}, 1); };
  for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    double xi = t * 1 + (1 - t) * 2;
    double oracle = brute_sup(f, xi, -10, 10, 1e-3);
    double G = boundary_conjugate(B, 1, kX, kN, {xi, 0});
    CHECK(G == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(G == doctest::Approx(t * 1 + (1 - t) * 3).epsilon(1e-9));
    CHECK(G >= -B(kX, kN, {0, 0}, 1) - 1e-12);
  }
}

TEST_CASE("moreau: affine B") {
  auto B = BoundaryModel::affine(1.5, 0.0, Expr::constant(0.4));
  for (double p : {-1.0, 0.0, 2.3}) {
    auto m = moreau(B, 1, kX, kN, {p, 0}, 0.1);
    CHECK(m.gradient.x == 1.5);
    // envelope of gamma.p - g is gamma.p - g - delta |gamma|^2 / 2, checked on a dense q-grid
    double brute = 1e300;
    for (double q = p - 3; q <= p + 3; q += 1e-4) brute = std::min(brute, 1.5 * q - 0.4 + (p - q) * (p - q) / 0.2);
    CHECK(m.value == doctest::Approx(brute).epsilon(1e-7));
    CHECK(std::abs(m.value - (1.5 * p - 0.4 - 0.1 * 2.25 / 2)) <= 1e-12);
    CHECK(m.value <= B(kX, kN, {p, 0}, 1));
  }
  auto m = moreau(BoundaryModel::neumann(), 2, {0, 1}, {0, 1}, {0.3, -0.2}, 0.7);
  CHECK(m.gradient.x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m.gradient.y == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("moreau: two-affine max at the kink against a dense q-grid") {
  auto B = BoundaryModel::max_affine({{1, 0, Expr::constant(1)}, {2, 0, Expr::constant(3)}});
  double p = 2.0, delta = 0.1;
  auto m = moreau(B, 1, kX, kN, {p, 0}, delta);
  double brute = 1e300;
  for (double q = p - 2; q <= p + 2; q += 1e-5) brute = std::min(brute, B(kX, kN, {q, 0}, 1) + (p - q) * (p - q) / (2 * delta));
  CHECK(m.value == doctest::Approx(brute).epsilon(1e-8));
  CHECK(m.value < B(kX, kN, {p, 0}, 1));
  CHECK(std::abs(m.gradient.x) <= B.lipschitz() + 1e-12);
}

TEST_CASE("oblique selection: affine exactness and membership") {
  auto B = BoundaryModel::affine(1.2, 0.3, Expr::constant(0.25));
  auto sel = oblique_selection(B, 2, 0.05, [](Vec x) { return Vec{x.y, -x.x}; });
  for (double a = 0; a < 2 * M_PI; a += 0.5) {
    Vec n{std::cos(a), std::sin(a)};
    auto s = sel.at(n, n);
    Vec gamma = 1.2 * n + 0.3 * perp(n);
    CHECK(std::abs(s.gamma.x - gamma.x) <= 1e-12);
    CHECK(std::abs(s.gamma.y - gamma.y) <= 1e-12);
    CHECK(std::abs(s.g - 0.25) <= 1e-12);
    CHECK(sel.membership_violation(n, n) <= 1e-12);
  }
  auto s0 = oblique_selection(BoundaryModel::neumann(), 1, 0.05).at(kX, kN);
  CHECK(s0.gamma.x == doctest::Approx(1.0));
  CHECK(s0.g == doctest::Approx(0.0));
}

TEST_CASE("oblique selection: two-affine max with psi=0 is tight within 0.1") {
  auto B = BoundaryModel::max_affine({{1, 0, Expr::constant(0)}, {2, 0, Expr::constant(0)}});
  auto sel = oblique_selection(B, 1, 0.05);
  CHECK(sel.tightness_gap(kX, kN) <= 0.1);
  CHECK(sel.tightness_gap(kX, kN) >= -1e-12);
  // membership against a dense p-grid: gamma p - g <= B(p)
  auto s = sel.at(kX, kN);
  for (double p = -5; p <= 5; p += 1e-3) CHECK(s.gamma.x * p - s.g <= B(kX, kN, {p, 0}, 1) + 1e-12);
}

TEST_CASE("Fenchel-Young on random samples") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> P(-3, 3), X(0, 1);
  for (auto H : {Hamiltonian::quadratic(1.0, Expr::parse("sin(x)", {"x", "y"})), Hamiltonian::double_well()}) {
    for (int k = 0; k < 300; ++k) {
      Vec x{X(rng), 0}, p{P(rng), 0}, xi{P(rng), 0};
      double L = lagrangian(H, 1, x, xi);
      CHECK(dot(xi, p) <= H(x, p) + L + 1e-9);
    }
  }
}
