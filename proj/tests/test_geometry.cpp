#include <doctest.h>

#include <cmath>

#include "hjn/geometry.hpp"

using namespace hjn;

TEST_CASE("grid: interval h=0.25") {
  auto g = build_grid(Domain::interval(0, 1), 0.25);
  REQUIRE(g->size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(g->is_boundary(i) == (i == 0 || i == 4));
  CHECK(g->normal(0).x == -1.0);
  CHECK(g->normal(4).x == 1.0);
  CHECK(g->position(4).x == doctest::Approx(1.0));
}

TEST_CASE("grid: disc boundary nodes snapped to the circle") {
  auto g = build_grid(Domain::disc({0, 0}, 1.0), 0.5);
  REQUIRE(!g->boundary_nodes().empty());
  for (int b : g->boundary_nodes()) {
    CHECK(std::abs(norm(g->position(b)) - 1.0) <= 1e-10);
    CHECK(std::abs(norm(g->normal(b)) - 1.0) <= 1e-12);
  }
}

TEST_CASE("grid: rectangle 11x11 with 40 boundary nodes (enumeration oracle)") {
  auto g = build_grid(Domain::rectangle({0, 0}, {1, 1}), 0.1);
  CHECK(g->size() == 121);
  // oracle: lattice points with an index on the frame
  int frame = 0;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) frame += (i == 0 || i == 10 || j == 0 || j == 10);
  CHECK(g->boundary_nodes().size() == static_cast<std::size_t>(frame));
  CHECK(frame == 40);
}

TEST_CASE("grid: normal invariants on a disc") {
  auto dom = Domain::disc({0.2, -0.1}, 0.8);
  auto g = build_grid(dom, 0.05);
  for (int b : g->boundary_nodes()) {
    Vec x = g->position(b);
    Vec gr = dom.grad_rho(x);
    CHECK(norm(gr) > 0);
    CHECK(std::abs(dot(gr, g->normal(b)) - norm(gr)) <= 1e-10);
    CHECK(std::abs(dom.rho(x)) <= 1e-10);
  }
}

TEST_CASE("grid: every boundary node has an interior neighbour; interior stencils are full") {
  auto g = build_grid(Domain::disc({0, 0}, 1.0), 0.1);
  for (std::size_t i = 0; i < g->size(); ++i) {
    auto c = g->cell(i);
    if (g->is_boundary(i)) {
      bool any = false;
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          int j = g->node_at(c[0] + dx, c[1] + dy);
          if (j >= 0 && !g->is_boundary(j)) any = true;
        }
      CHECK(any);
    } else {
      for (int a = 0; a < 2; ++a)
        for (int s = 0; s < 2; ++s) CHECK(g->neighbor(i, a, s) >= 0);
    }
  }
}

TEST_CASE("grid: deterministic ordering") {
  auto a = build_grid(Domain::disc({0, 0}, 1.0), 0.07);
  auto b = build_grid(Domain::disc({0, 0}, 1.0), 0.07);
  REQUIRE(a->size() == b->size());
  for (std::size_t i = 0; i < a->size(); ++i) {
    CHECK(a->position(i) == b->position(i));
    CHECK(a->is_boundary(i) == b->is_boundary(i));
  }
}

TEST_CASE("grid: construction errors") {
  CHECK_THROWS_AS(build_grid(Domain::interval(0, 1), 0.0), GeometryError);
  CHECK_THROWS_AS(build_grid(Domain::interval(0, 1), 0.3), GeometryError);
  CHECK_THROWS_AS(Domain::interval(1, 0), GeometryError);
}

TEST_CASE("grid: interpolation reproduces affine functions") {
  auto g = build_grid(Domain::rectangle({0, 0}, {1, 1}), 0.1);
  std::vector<double> u(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) u[i] = 2 * g->position(i).x - 3 * g->position(i).y + 1;
  for (Vec p : {Vec{0.33, 0.71}, Vec{0.05, 0.95}, Vec{1.0, 0.0}}) {
    CHECK(g->interpolate(u, p) == doctest::Approx(2 * p.x - 3 * p.y + 1).epsilon(1e-12));
    auto st = g->locate(p);
    double s = 0;
    for (int k = 0; k < st.count; ++k) {
      CHECK(st.weight[k] >= 0);
      s += st.weight[k];
    }
    CHECK(s == doctest::Approx(1.0));
  }
}

TEST_CASE("project_to_closure") {
  auto I = Domain::interval(0, 1);
  CHECK(project_to_closure(I, {1.3, 0}).x == doctest::Approx(1.0));
  CHECK(project_to_closure(I, {0.4, 0}).x == 0.4);
  auto D = Domain::disc({0, 0}, 1.0);
  Vec p = project_to_closure(D, {2, 0});
  CHECK(p.x == doctest::Approx(1.0));
  CHECK(p.y == doctest::Approx(0.0));
  CHECK(D.rho(p) <= 1e-10);
  Vec q = project_to_closure(D, {0.3, 0.1});
  CHECK(q == Vec{0.3, 0.1});
}

TEST_CASE("custom domain from an expression matches the disc") {
  auto c = Domain::custom(2, Expr::parse("x^2 + y^2 - 1", {"x", "y"}), {-1.2, -1.2}, {1.2, 1.2});
  CHECK(c.rho({0, 0}) < 0);
  CHECK(c.rho({1.1, 0}) > 0);
  Vec n = c.normal({0, 1});
  CHECK(n.y == doctest::Approx(1.0));
  Vec p = project_to_closure(c, {0, 1.05});
  CHECK(c.rho(p) <= 1e-10);
  CHECK(p.y == doctest::Approx(1.0).epsilon(1e-8));
}
