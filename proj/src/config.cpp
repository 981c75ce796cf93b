#include "hjn/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "hjn/io.hpp"

namespace hjn {

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& sec, const std::string& key, int line) {
  return "line " + std::to_string(line) + ", [" + sec + "] " + key + ": ";
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_double(trim(tok)));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string squeeze(const std::string& s) {
  std::string o;
  for (char c : s)
    if (c != ' ' && c != '\t') o += c;
  return o;
}

}  // namespace

Ini parse_ini(const std::string& text) {
  Ini ini;
  std::istringstream in(text);
  std::string line, section;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(no) + ": empty section name");
      ini[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(no) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(no) + ": key outside any section");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(no) + ": empty key");
    if (ini[section].count(key))
      throw ConfigError("line " + std::to_string(no) + ": duplicate key '" + key + "' in [" + section + "]");
    ini[section][key] = {trim(line.substr(eq + 1)), no};
  }
  return ini;
}

ExperimentConfig parse_config(const std::string& text) {
  Ini ini = parse_ini(text);
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&)>;
  auto num = [](double& dst) { return Setter([&dst](const std::string& v) { dst = parse_double(v); }); };
  auto integer = [](int& dst) {
    return Setter([&dst](const std::string& v) {
      double d = parse_double(v);
      if (d != std::floor(d)) throw ConfigError("expected an integer");
      dst = static_cast<int>(d);
    });
  };
  auto str = [](std::string& dst) { return Setter([&dst](const std::string& v) { dst = v; }); };
  auto list = [](std::vector<double>& dst) { return Setter([&dst](const std::string& v) { dst = parse_list(v); }); };
  auto flag = [](bool& dst) {
    return Setter([&dst](const std::string& v) {
      if (v == "true" || v == "1" || v == "yes") dst = true;
      else if (v == "false" || v == "0" || v == "no") dst = false;
      else throw ConfigError("expected true or false");
    });
  };
  auto choice = [](std::string& dst, std::set<std::string> allowed) {
    return Setter([&dst, allowed](const std::string& v) {
      if (!allowed.count(v)) {
        std::string names;
        for (const auto& a : allowed) names += (names.empty() ? "" : ", ") + a;
        throw ConfigError("unknown name '" + v + "' (expected one of " + names + ")");
      }
      dst = v;
    });
  };
  double seed = c.seed;

  std::map<std::string, std::map<std::string, Setter>> schema{
      {"geometry",
       {{"kind", choice(c.geometry, {"interval", "rectangle", "disc", "custom"})},
        {"lo", list(c.lo)},
        {"hi", list(c.hi)},
        {"center", list(c.center)},
        {"radius", num(c.radius)},
        {"rho", str(c.rho)},
        {"dim", integer(c.dim)},
        {"h", num(c.h)}}},
      {"hamiltonian",
       {{"name", choice(c.hamiltonian, {"quadratic", "eikonal", "double_well", "polynomial"})},
        {"a", num(c.a)},
        {"speed", num(c.speed)},
        {"potential", str(c.potential)},
        {"coeffs", list(c.coeffs)}}},
      {"boundary",
       {{"name", choice(c.boundary, {"neumann", "affine", "max_affine", "user"})},
        {"kind", choice(c.kind, {"cn", "dbc"})},
        {"g", str(c.g)},
        {"a", num(c.normal_coef)},
        {"b", num(c.tangent_coef)},
        {"forms", str(c.forms)},
        {"form", str(c.form)},
        {"theta", num(c.theta)},
        {"lipschitz", num(c.lipschitz)},
        {"convex", flag(c.convex)}}},
      {"run",
       {{"command", choice(c.command, {"evolve", "ergodic", "value", "crosscheck", "skorokhod", "distance", "aubry",
                                       "asymptotic", "monotonicity", "audit", "report"})},
        {"T", num(c.T)},
        {"dt", num(c.dt)},
        {"record_every", num(c.record_every)},
        {"cfl", num(c.cfl)},
        {"flux", choice(c.flux, {"godunov", "lax_friedrichs"})},
        {"u0", str(c.u0)},
        {"eps", list(c.eps)},
        {"cauchy_tol", num(c.cauchy_tol)},
        {"samples", integer(c.samples)},
        {"ladder", integer(c.ladder)},
        {"delta", num(c.delta)},
        {"source", list(c.source)},
        {"aubry_tol", num(c.aubry_tol)},
        {"eta", num(c.eta)},
        {"shift", num(c.shift)},
        {"burn_in", num(c.burn_in)},
        {"per_node", flag(c.per_node)},
        {"x0", list(c.x0)},
        {"vx", str(c.vx)},
        {"vy", str(c.vy)},
        {"seed", num(seed)},
        {"sample_budget", integer(c.sample_budget)},
        {"out", str(c.out)}}},
  };

  for (const auto& [sec, keys] : ini) {
    auto s = schema.find(sec);
    if (s == schema.end()) {
      int line = keys.empty() ? 0 : keys.begin()->second.line;
      throw ConfigError("unknown section [" + sec + "]" + (line ? " (line " + std::to_string(line) + ")" : ""));
    }
    for (const auto& [key, val] : keys) {
      auto k = s->second.find(key);
      if (k == s->second.end()) throw ConfigError(where(sec, key, val.line) + "unknown key");
      try {
        k->second(val.value);
      } catch (const ConfigError& e) {
        throw ConfigError(where(sec, key, val.line) + e.what());
      }
    }
  }
  c.seed = static_cast<unsigned>(seed);

  auto line_of = [&](const std::string& sec, const std::string& key) {
    auto s = ini.find(sec);
    if (s == ini.end()) return 0;
    auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.line;
  };
  auto require = [&](bool ok, const std::string& sec, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(where(sec, key, line_of(sec, key)) + msg);
  };
  if (c.geometry == "interval") c.dim = 1;
  if (c.geometry == "rectangle" || c.geometry == "disc") c.dim = 2;
  require(c.dim == 1 || c.dim == 2, "geometry", "dim", "must be 1 or 2");
  require(c.h > 0 && c.h < 1, "geometry", "h", "must lie in (0, 1)");
  if (c.geometry == "interval") {
    require(c.lo.size() == 1, "geometry", "lo", "interval needs one value");
    require(c.hi.size() == 1 && c.hi[0] > c.lo[0], "geometry", "hi", "interval needs hi > lo");
  } else if (c.geometry == "rectangle") {
    if (!line_of("geometry", "lo")) c.lo = {0.0, 0.0};
    if (!line_of("geometry", "hi")) c.hi = {1.0, 1.0};
    require(c.lo.size() == 2, "geometry", "lo", "rectangle needs two values");
    require(c.hi.size() == 2 && c.hi[0] > c.lo[0] && c.hi[1] > c.lo[1], "geometry", "hi",
            "rectangle needs hi > lo componentwise");
  } else if (c.geometry == "disc") {
    require(c.center.size() == 2, "geometry", "center", "disc needs two values");
    require(c.radius > 0, "geometry", "radius", "must be positive");
  } else {
    require(!c.rho.empty(), "geometry", "rho", "custom geometry needs rho");
    require(c.lo.size() == static_cast<std::size_t>(c.dim) && c.hi.size() == c.lo.size(), "geometry", "lo",
            "custom geometry needs a bounding box with dim values");
  }
  if (c.hamiltonian == "quadratic") require(c.a > 0, "hamiltonian", "a", "must be positive");
  if (c.hamiltonian == "eikonal") require(c.speed > 0, "hamiltonian", "speed", "must be positive");
  if (c.hamiltonian == "polynomial")
    require(c.coeffs.size() >= 2 && c.coeffs.back() > 0, "hamiltonian", "coeffs",
            "need at least two coefficients and a positive leading one");
  if (c.boundary == "max_affine") require(!c.forms.empty(), "boundary", "forms", "max_affine needs forms");
  if (c.boundary == "user") require(!c.form.empty(), "boundary", "form", "user boundary needs form");
  require(c.T >= 0, "run", "T", "must be nonnegative");
  require(c.dt >= 0, "run", "dt", "must be nonnegative");
  require(c.record_every >= 0, "run", "record_every", "must be nonnegative");
  require(c.cfl > 0 && c.cfl <= 1, "run", "cfl", "must lie in (0, 1]");
  for (double e : c.eps) require(e > 0 && e < 1, "run", "eps", "every value must lie in (0, 1)");
  require(c.cauchy_tol > 0, "run", "cauchy_tol", "must be positive");
  require(c.samples >= 3 && c.samples <= 257, "run", "samples", "must lie in [3, 257]");
  require(c.ladder >= 0 && c.ladder <= 24, "run", "ladder", "must lie in [0, 24]");
  require(c.delta > 0, "run", "delta", "must be positive");
  require(c.eta >= 0, "run", "eta", "must be nonnegative");
  require(c.sample_budget > 0, "run", "sample_budget", "must be positive");
  require(c.x0.size() == 1 || c.x0.size() == 2, "run", "x0", "needs one or two values");
  require(c.source.empty() || c.source.size() == static_cast<std::size_t>(c.dim), "run", "source",
          "needs dim values");

  // expressions are checked here so errors carry the key
  auto check = [&](const std::string& sec, const std::string& key, const std::string& text,
                   const std::vector<std::string>& vars) {
    try {
      Expr::parse(text, vars);
    } catch (const ConfigError& e) {
      throw ConfigError(where(sec, key, line_of(sec, key)) + e.what());
    }
  };
  check("hamiltonian", "potential", c.potential, {"x", "y"});
  check("boundary", "g", c.g, {"x", "y"});
  check("run", "u0", c.u0, {"x", "y"});
  check("run", "vx", c.vx, {"t"});
  check("run", "vy", c.vy, {"t"});
  if (!c.rho.empty()) check("geometry", "rho", c.rho, {"x", "y"});
  if (!c.form.empty()) check("boundary", "form", c.form, {"x", "y", "pn", "pt"});
  if (c.boundary == "max_affine") {
    try {
      make_boundary(c);
    } catch (const ConfigError& e) {
      throw ConfigError(where("boundary", "forms", line_of("boundary", "forms")) + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> ExperimentConfig::canonical() const {
  std::map<std::string, std::string> m;
  m["geometry.kind"] = geometry;
  m["geometry.dim"] = std::to_string(dim);
  m["geometry.h"] = format_double(h);
  if (geometry == "disc") {
    m["geometry.center"] = join(center);
    m["geometry.radius"] = format_double(radius);
  } else {
    m["geometry.lo"] = join(lo);
    m["geometry.hi"] = join(hi);
  }
  if (geometry == "custom") m["geometry.rho"] = squeeze(rho);
  m["hamiltonian.name"] = hamiltonian;
  if (hamiltonian == "quadratic") m["hamiltonian.a"] = format_double(a);
  if (hamiltonian == "eikonal") m["hamiltonian.speed"] = format_double(speed);
  if (hamiltonian == "polynomial") m["hamiltonian.coeffs"] = join(coeffs);
  if (hamiltonian != "double_well") m["hamiltonian.potential"] = squeeze(potential);
  m["boundary.name"] = boundary;
  m["boundary.kind"] = kind;
  if (boundary == "neumann" || boundary == "affine") m["boundary.g"] = squeeze(g);
  if (boundary == "affine") {
    m["boundary.a"] = format_double(normal_coef);
    m["boundary.b"] = format_double(tangent_coef);
  }
  if (boundary == "max_affine") m["boundary.forms"] = squeeze(forms);
  if (boundary == "user") {
    m["boundary.form"] = squeeze(form);
    m["boundary.theta"] = format_double(theta);
    m["boundary.lipschitz"] = format_double(lipschitz);
    m["boundary.convex"] = convex ? "true" : "false";
  }
  m["run.command"] = command;
  m["run.T"] = format_double(T);
  m["run.dt"] = format_double(dt);
  m["run.record_every"] = format_double(record_every);
  m["run.cfl"] = format_double(cfl);
  m["run.flux"] = flux;
  m["run.u0"] = squeeze(u0);
  m["run.eps"] = join(eps);
  m["run.cauchy_tol"] = format_double(cauchy_tol);
  m["run.samples"] = std::to_string(samples);
  m["run.ladder"] = std::to_string(ladder);
  m["run.delta"] = format_double(delta);
  m["run.source"] = join(source);
  m["run.aubry_tol"] = format_double(aubry_tol);
  m["run.eta"] = format_double(eta);
  m["run.shift"] = format_double(shift);
  m["run.burn_in"] = format_double(burn_in);
  m["run.per_node"] = per_node ? "true" : "false";
  m["run.x0"] = join(x0);
  m["run.vx"] = squeeze(vx);
  m["run.vy"] = squeeze(vy);
  m["run.seed"] = std::to_string(seed);
  m["run.sample_budget"] = std::to_string(sample_budget);
  return m;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const {
  std::string s;
  for (const auto& [k, v] : canonical()) s += k + "=" + v + "\n";
  return fnv1a(s);
}

Domain make_domain(const ExperimentConfig& c) {
  if (c.geometry == "interval") return Domain::interval(c.lo[0], c.hi[0]);
  if (c.geometry == "rectangle") return Domain::rectangle({c.lo[0], c.lo[1]}, {c.hi[0], c.hi[1]});
  if (c.geometry == "disc") return Domain::disc({c.center[0], c.center[1]}, c.radius);
  Vec lo{c.lo[0], c.dim == 2 ? c.lo[1] : 0.0}, hi{c.hi[0], c.dim == 2 ? c.hi[1] : 0.0};
  return Domain::custom(c.dim, Expr::parse(c.rho, {"x", "y"}), lo, hi);
}

Hamiltonian make_hamiltonian(const ExperimentConfig& c) {
  Expr V = Expr::parse(c.potential, {"x", "y"});
  if (c.hamiltonian == "quadratic") return Hamiltonian::quadratic(c.a, V);
  if (c.hamiltonian == "eikonal") return Hamiltonian::eikonal(c.speed, V);
  if (c.hamiltonian == "double_well") return Hamiltonian::double_well();
  return Hamiltonian::polynomial(c.coeffs, V);
}

BoundaryModel make_boundary(const ExperimentConfig& c) {
  Expr g = Expr::parse(c.g, {"x", "y"});
  if (c.boundary == "neumann") return BoundaryModel::neumann(g);
  if (c.boundary == "affine") return BoundaryModel::affine(c.normal_coef, c.tangent_coef, g);
  if (c.boundary == "user")
    return BoundaryModel::user(Expr::parse(c.form, {"x", "y", "pn", "pt"}), c.theta, c.lipschitz, c.convex);
  std::vector<AffineForm> forms;
  std::stringstream ss(c.forms);
  std::string item;
  while (std::getline(ss, item, '|')) {
    item = trim(item);
    if (item.empty()) continue;
    auto p1 = item.find(':');
    auto p2 = p1 == std::string::npos ? p1 : item.find(':', p1 + 1);
    if (p2 == std::string::npos) throw ConfigError("form '" + item + "' is not a:b:g");
    forms.push_back({parse_double(trim(item.substr(0, p1))), parse_double(trim(item.substr(p1 + 1, p2 - p1 - 1))),
                     Expr::parse(trim(item.substr(p2 + 1)), {"x", "y"})});
  }
  if (forms.empty()) throw ConfigError("no affine forms given");
  return BoundaryModel::max_affine(std::move(forms));
}

ProblemKind problem_kind(const ExperimentConfig& c) { return c.kind == "dbc" ? ProblemKind::dbc : ProblemKind::cn; }

SchemeOptions scheme_options(const ExperimentConfig& c) {
  SchemeOptions o;
  o.flux = c.flux == "lax_friedrichs" ? Flux::lax_friedrichs : Flux::godunov;
  o.cfl = c.cfl;
  return o;
}

}  // namespace hjn
