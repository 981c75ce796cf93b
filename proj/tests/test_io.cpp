#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "hjn/io.hpp"

using namespace hjn;

namespace {
std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}
}  // namespace

TEST_CASE("format_double round-trips bit-exactly") {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 10000; ++k) {
    std::uint64_t bits = rng();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    double w = parse_double(format_double(v));
    CHECK(std::memcmp(&v, &w, sizeof v) == 0);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
  CHECK(parse_double(format_double(-std::numeric_limits<double>::infinity())) < 0);
  CHECK_THROWS(parse_double("1.5x"));
}

TEST_CASE("csv: one row gives header plus row") {
  Table t;
  t.meta["h"] = "0.5";
  t.columns = {"x", "u"};
  t.rows = {{0.25, -1.0}};
  auto s = to_csv(t);
  CHECK(count_lines(s) == 2);
  CHECK(s.rfind("# hj-neumann v", 0) == 0);
  CHECK(s.find("h=0.5") != std::string::npos);
}

TEST_CASE("csv: field round-trip is bit-exact") {
  auto g = build_grid(Domain::disc({0, 0}, 1), 0.1);
  auto f = sample_field(g, [](Vec p) { return std::exp(p.x) * std::sin(p.y) / 3.0; });
  auto t = field_table(f, 0.001);
  auto back = parse_csv(to_csv(t));
  CHECK(back.columns == std::vector<std::string>{"x", "y", "u"});
  CHECK(back.meta.at("dt") == format_double(0.001));
  REQUIRE(back.rows.size() == g->size());
  std::size_t cu = back.column("u");
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(back.rows[i][cu] == f.values[i]);
  CHECK(to_csv(back) == to_csv(t));
}

TEST_CASE("csv: space-time round-trip") {
  auto g = build_grid(Domain::interval(0, 1), 0.05);
  auto u0 = sample_field(g, [](Vec p) { return p.x * p.x; });
  auto evo = evolve(u0, Hamiltonian::eikonal(1.0), BoundaryModel::neumann(), ProblemKind::cn, 0.5, 0.25);
  auto back = spacetime_from_table(parse_csv(to_csv(spacetime_table(evo))), g);
  CHECK(back.times == evo.times);
  CHECK(back.values == evo.values);
}

TEST_CASE("csv: malformed input") {
  CHECK_THROWS(parse_csv("x,u\n1,2\n"));
  CHECK_THROWS(parse_csv("# hj-neumann v0.1.0 | x,u\n1,2,3\n"));
}

TEST_CASE("svg: mu trace with a reference line, log axis, byte-stable") {
  Series a{"mu+", {0, 1, 2}, {0.9, 0.95, 1.0}}, b{"mu-", {0, 1, 2}, {1.2, 1.1, 1.0}};
  PlotOptions o;
  o.title = "mu";
  o.reference_y = 1.0;
  auto s1 = svg_lines({a, b}, o);
  CHECK(s1 == svg_lines({a, b}, o));
  CHECK(s1.rfind("<svg", 0) == 0);
  CHECK(s1.find("stroke-dasharray") != std::string::npos);
  CHECK(s1.find("mu+") != std::string::npos);
  CHECK(s1.find("mu-") != std::string::npos);
  PlotOptions lo;
  lo.log_x = true;
  lo.xlabel = "eps";
  Series e{"eps u", {1e-3, 1e-2, 1e-1}, {-0.99, -0.9, -0.5}};
  auto s2 = svg_lines({e}, lo);
  CHECK(s2.find("eps") != std::string::npos);
  auto g = build_grid(Domain::disc({0, 0}, 1), 0.2);
  auto heat = svg_heat(sample_field(g, [](Vec p) { return p.x; }), {});
  CHECK(heat.find("<rect") != std::string::npos);
}
