#include <doctest.h>

#include "hjn/config.hpp"

using namespace hjn;

namespace {
const char* kBase = R"(# double well
[geometry]
kind = interval
lo = 0
hi = 1
h = 0.01

[hamiltonian]
name = double_well

[boundary]
name = neumann
kind = cn

[run]
command = ergodic
eps = 0.1, 0.01, 0.001
out = results
)";
}  // namespace

TEST_CASE("config: parse and build models") {
  auto c = parse_config(kBase);
  CHECK(c.command == "ergodic");
  CHECK(c.eps == std::vector<double>{0.1, 0.01, 0.001});
  CHECK(c.h == 0.01);
  CHECK(make_hamiltonian(c)({0, 0}, {0, 0}) == 1.0);
  CHECK(make_domain(c).kind() == DomainKind::interval);
  CHECK(problem_kind(c) == ProblemKind::cn);
}

TEST_CASE("config: unknown keys and sections carry the line") {
  std::string bad = std::string(kBase) + "bogus = 1\n";
  try {
    parse_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string w = e.what();
    CHECK(w.find("bogus") != std::string::npos);
    CHECK(w.find("line 19") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("x = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nT = 1\nT = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nT = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\ncommand = fly\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[hamiltonian]\nname = cubic\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nu0 = sin(\n"), ConfigError);
}

TEST_CASE("config: hash is stable and tracks meaningful keys only") {
  auto a = parse_config(kBase), b = parse_config(kBase);
  CHECK(a.hash() == b.hash());
  std::string other_out = kBase;
  other_out.replace(other_out.find("out = results"), 13, "out = elsewhere");
  CHECK(parse_config(other_out).hash() == a.hash());
  std::string comment = std::string("; leading comment\n") + kBase;
  CHECK(parse_config(comment).hash() == a.hash());
  // same value spelled differently
  std::string spelled = kBase;
  spelled.replace(spelled.find("h = 0.01"), 8, "h = 1e-2");
  CHECK(parse_config(spelled).hash() == a.hash());
  std::string changed = kBase;
  changed.replace(changed.find("h = 0.01"), 8, "h = 0.02");
  CHECK(parse_config(changed).hash() != a.hash());
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
}

TEST_CASE("config: max_affine forms") {
  auto c = parse_config("[boundary]\nname = max_affine\nforms = 1:0:1 | 2:0:3\n");
  auto B = make_boundary(c);
  CHECK(B.forms().size() == 2);
  CHECK(B({1, 0}, {1, 0}, {3, 0}, 1) == doctest::Approx(3.0));
}
