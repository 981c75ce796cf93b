#include "hjn/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "hjn/audit.hpp"
#include "hjn/conjugate.hpp"
#include "hjn/ergodic.hpp"
#include "hjn/skorokhod.hpp"
#include "hjn/variational.hpp"
#include "hjn/weak_kam.hpp"

namespace hjn::acceptance {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

GridPtr unit_interval(double h) { return build_grid(Domain::interval(0.0, 1.0), h); }

// W(x) = cos(2 pi (x - 1/2)): single maximum at 1/2; H = p^2/2 + W - 1 has c = 0
Hamiltonian cosine_well() { return Hamiltonian::quadratic(1.0, Expr::parse("cos(2*pi*(x-0.5)) - 1", {"x", "y"})); }

struct Case {
  std::string name;
  Hamiltonian H;
  BoundaryModel B;
  ProblemKind kind;
};

// ---------------------------------------------------------------- 1
void eigenvalue(Result& r) {
  auto grid = unit_interval(5e-3);
  Hamiltonian H = Hamiltonian::double_well();
  BoundaryModel B = BoundaryModel::neumann();
  ErgodicPair ep = ergodic_limit(grid, H, B, ProblemKind::cn, default_eps_schedule());
  GridField u0 = sample_field(grid, [](Vec x) { return 0.4 * std::sin(2 * kPi * x.x) + 0.3 * x.x; });
  SpaceTimeField evo = evolve(u0, H, B, ProblemKind::cn, 10.0, 1.0);
  double slope = large_time_slope(evo, 5.0, 10.0);
  r.passed = std::abs(ep.c - 1.0) <= 5e-2 && std::abs(slope - ep.c) <= 1e-2;
  r.detail = "c=" + fmt("%.6f", ep.c) + " slope=" + fmt("%.6f", slope) + " |slope-c|=" + fmt("%.2e", std::abs(slope - ep.c));
}

// ---------------------------------------------------------------- 2
std::function<double(Vec)> random_lipschitz(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double a[4], ph[4];
  for (int k = 0; k < 4; ++k) {
    a[k] = 0.5 * U(rng) / (k + 1);
    ph[k] = kPi * U(rng);
  }
  return [=](Vec x) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += a[k] * std::sin((k + 1) * kPi * x.x + ph[k]);
    return s;
  };
}

void comparison(Result& r) {
  std::vector<Case> cases{
      {"cosine-well/neumann", cosine_well(), BoundaryModel::neumann(), ProblemKind::cn},
      {"double-well/affine-cn", Hamiltonian::double_well(), BoundaryModel::affine(1.0, 0.0, Expr::parse("0.5*x-0.2", {"x", "y"})),
       ProblemKind::cn},
      {"eikonal/affine-dbc", Hamiltonian::eikonal(1.0), BoundaryModel::affine(1.0, 0.0, Expr::constant(-0.5)),
       ProblemKind::dbc},
  };
  auto grid = unit_interval(0.01);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  long order_viol = 0, growth_viol = 0, rounding = 0, steps_total = 0;
  double worst_growth = 0.0;
  for (const auto& cs : cases) {
    Scheme scheme(grid, cs.H, cs.B, cs.kind);
    for (int pair = 0; pair < 20; ++pair) {
      auto f = random_lipschitz(rng);
      auto bump = random_lipschitz(rng);
      double gap = 0.05 + 0.45 * U(rng);
      GridField u = sample_field(grid, f);
      GridField v = sample_field(grid, [&](Vec x) { return f(x) + gap * (1.0 + 0.5 * std::tanh(bump(x))); });
      double prev = sup_diff(u.values, v.values);
      for (int k = 0; k < 400; ++k) {
        if (k % 16 == 0)
          scheme.ensure_gradient_bound(std::max(scheme.gradient_bound(u.values), scheme.gradient_bound(v.values)));
        double dt = scheme.dt();
        u.values = scheme.step(u.values, dt);
        v.values = scheme.step(v.values, dt);
        ++steps_total;
        for (std::size_t i = 0; i < u.values.size(); ++i)
          if (!(u.values[i] <= v.values[i])) ++order_viol;
        double d = sup_diff(u.values, v.values);
        // u - dt F(u) is rounded once per node: allow 4 ulp of the field magnitude
        double scale = 0.0;
        for (std::size_t i = 0; i < u.values.size(); ++i)
          scale = std::max({scale, std::abs(u.values[i]), std::abs(v.values[i])});
        if (d > prev) {
          ++rounding;
          worst_growth = std::max(worst_growth, (d - prev) / (scale * 0x1p-52));
          if (d - prev > 4.0 * scale * 0x1p-52) ++growth_viol;
        }
        prev = d;
      }
    }
  }
  r.passed = order_viol == 0 && growth_viol == 0;
  r.detail = std::to_string(steps_total) + " steps, order violations " + std::to_string(order_viol) +
             ", sup-norm increases beyond rounding " + std::to_string(growth_viol) + " (" + std::to_string(rounding) +
             " at rounding level, worst " + fmt("%.2f", worst_growth) + " ulp)";
}

// ---------------------------------------------------------------- 3
void large_time(Result& r) {
  std::vector<Case> cases{
      {"cosine-well", cosine_well(), BoundaryModel::neumann(), ProblemKind::cn},
      {"double-well", Hamiltonian::double_well(), BoundaryModel::neumann(), ProblemKind::cn},
      {"eikonal", Hamiltonian::eikonal(1.0), BoundaryModel::neumann(), ProblemKind::cn},
  };
  const double h = 0.01;
  auto grid = unit_interval(h);
  GridField u0 = sample_field(grid, [](Vec x) { return 0.3 * std::sin(2 * kPi * x.x) + 0.5 * x.x; });
  bool ok = true;
  std::ostringstream det;
  for (const auto& cs : cases) {
    ErgodicPair ep = ergodic_limit(grid, cs.H, cs.B, cs.kind, default_eps_schedule());
    auto [Hn, Bn] = normalize(cs.H, cs.B, ep.c, cs.kind);
    SpaceTimeField ref = evolve(u0, Hn, Bn, cs.kind, 64.0, 64.0);
    const auto& v = ref.values.back();
    SpaceTimeField evo = evolve(u0, Hn, Bn, cs.kind, 16.0, 0.5);
    std::vector<double> errs;
    for (double t : {2.0, 4.0, 8.0, 16.0}) errs.push_back(sup_diff(evo.values[evo.stamp(t)], v));
    bool mono = std::is_sorted(errs.rbegin(), errs.rend());
    double limit = 10.0 * (h + evo.dt);
    bool small = errs.back() <= limit;
    AuditOptions ao;
    ao.eigenvalue = ep.c;
    bool a6 = audit_assumptions(cs.H, cs.B, grid->domain(), ao).a6();
    MonotonicityTrace mt = monotonicity_trace(evo, GridField{grid, v}, 0.1);
    bool bounds = true;
    for (std::size_t k = 0; k < mt.s.size(); ++k)
      bounds = bounds && mt.mu_plus[k] >= 0.0 && mt.mu_plus[k] <= 1.0 && mt.mu_minus[k] >= 1.0;
    int k8 = evo.stamp(8.0);
    double dmu = std::max(std::abs(mt.mu_plus[k8] - 1.0), std::abs(mt.mu_minus[k8] - 1.0));
    bool mu_ok = bounds && (!a6 || dmu <= 0.02);
    ok = ok && mono && small && mu_ok;
    det << cs.name << ": c=" << fmt("%.4f", ep.c) << " err(2,4,8,16)=";
    for (std::size_t k = 0; k < errs.size(); ++k) det << (k ? "/" : "") << fmt("%.2e", errs[k]);
    det << " limit=" << fmt("%.3f", limit) << " A6=" << (a6 ? "yes" : "no") << " |mu(8)-1|=" << fmt("%.1e", dmu)
        << (mono && small && mu_ok ? "" : " FAIL") << "; ";
  }
  r.passed = ok;
  r.detail = det.str();
}

// ---------------------------------------------------------------- 4
double representation_error(const Case& cs, const std::function<double(Vec)>& u0f, double h, int samples) {
  auto grid = unit_interval(h);
  GridField u0 = sample_field(grid, u0f);
  SpaceTimeField evo = evolve(u0, cs.H, cs.B, cs.kind, 1.0, 0.5);
  ValueOptions vo;
  vo.samples = samples;
  vo.record_every = 0.5;
  ValueTable tb = value(u0, cs.H, cs.B, cs.kind, 1.0, vo);
  return crosscheck(tb, evo).final_error;
}

void representation(Result& r) {
  Case eik{"eikonal/neumann", Hamiltonian::eikonal(1.0), BoundaryModel::neumann(), ProblemKind::cn};
  Case dbc{"quadratic/affine-dbc", Hamiltonian::quadratic(1.0), BoundaryModel::affine(1.0, 0.0, Expr::constant(-1.0)),
           ProblemKind::dbc};
  double e1 = representation_error(eik, [](Vec x) { return x.x; }, 0.01, 33);
  double e2 = representation_error(eik, [](Vec x) { return x.x; }, 0.005, 65);
  double d1 = representation_error(dbc, [](Vec) { return 0.0; }, 0.01, 33);
  double d2 = representation_error(dbc, [](Vec) { return 0.0; }, 0.005, 65);
  auto halves = [](double a, double b) { return b / a >= 0.25 && b / a <= 0.75; };
  r.passed = e1 <= 0.05 && halves(e1, e2) && d1 <= 0.05 && halves(d1, d2);
  r.detail = "eikonal " + fmt("%.4f", e1) + " -> " + fmt("%.4f", e2) + " (ratio " + fmt("%.2f", e2 / e1) + "), dbc " +
             fmt("%.4f", d1) + " -> " + fmt("%.4f", d2) + " (ratio " + fmt("%.2f", d2 / d1) + ")";
}

// ---------------------------------------------------------------- 5
void skorokhod(Result& r) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int violations = 0, runs = 0;
  double worst_l = 0.0, worst_s = 0.0, worst_rho = 0.0;
  for (int run = 0; run < 100; ++run) {
    bool disc = run % 2 == 1;
    Domain dom = disc ? Domain::disc({0.0, 0.0}, 1.0) : Domain::interval(0.0, 1.0);
    int dim = dom.dim();
    double a = 1.0 + 0.5 * (U(rng) + 1.0), b = disc ? 0.5 * U(rng) : 0.0;
    BoundaryModel B = BoundaryModel::affine(a, b, Expr::parse(fmt("%.6f", U(rng)) + "*x + 0.3", {"x", "y"}));
    ObliqueSelection sel(B, dim);
    Vec x0 = disc ? Vec{0.6 * U(rng), 0.6 * U(rng)} : Vec{0.5 + 0.4 * U(rng), 0.0};
    double amp[4], fr[4];
    for (int k = 0; k < 4; ++k) {
      amp[k] = 3.0 * U(rng);
      fr[k] = 1.0 + 4.0 * (U(rng) + 1.0);
    }
    Control v = [=](double t) { return Vec{amp[0] * std::sin(fr[0] * t) + amp[1], amp[2] * std::cos(fr[2] * t) + amp[3]}; };
    SkorokhodTriple tr = integrate(dom, sel, x0, v, 2.0, 1e-3);
    BoundsReport br = verify_bounds(tr, dom, B.theta(), B.lipschitz());
    ++runs;
    if (!br.ok()) ++violations;
    worst_l = std::max(worst_l, br.max_l_ratio - br.l_bound);
    worst_s = std::max(worst_s, br.max_speed_ratio - br.speed_bound);
    worst_rho = std::max(worst_rho, br.max_rho);
  }
  // 1-D sticking: from 1/2 with unit speed towards the Neumann end at 1
  ObliqueSelection sel(BoundaryModel::neumann(), 1);
  SkorokhodTriple tr = integrate(Domain::interval(0.0, 1.0), sel, {0.5, 0.0}, [](double) { return Vec{1.0, 0.0}; }, 1.0, 0.01);
  double stick = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    stick = std::max(stick, std::abs(tr.eta[k].x - std::min(1.0, 0.5 + tr.times[k])));
  r.passed = violations == 0 && stick <= 1e-10;
  r.detail = std::to_string(runs) + " runs, " + std::to_string(violations) + " violating; max(l/|v|-1/theta)=" +
             fmt("%.1e", worst_l) + " max(speed-bound)=" + fmt("%.1e", worst_s) + " max rho=" + fmt("%.1e", worst_rho) +
             "; sticking error " + fmt("%.1e", stick);
}

// ---------------------------------------------------------------- 6
double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  double hs = (b - a) / n, s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * hs);
  return s * hs / 3.0;
}

void weak_kam(Result& r) {
  const double h = 0.01;
  auto grid = unit_interval(h);
  Hamiltonian H = cosine_well();
  BoundaryModel B = BoundaryModel::neumann();
  ActionMetric metric(grid, H, B);
  ActionMatrix A = action_matrix(metric);
  AubryMask M = aubry_set(A);
  const int star = grid->nearest_node({0.5, 0.0});
  bool localized = M.mask[star] != 0;
  int count = 0;
  for (std::size_t i = 0; i < grid->size(); ++i)
    if (M.mask[i]) {
      ++count;
      localized = localized && std::abs(grid->position(i).x - 0.5) <= 2.0 * h + 1e-12;
    }
  // Agmon distance from quadrature of sqrt(2 (max W - W))
  auto rate = [](double s) { return std::sqrt(2.0 * (1.0 - std::cos(2 * kPi * (s - 0.5)))); };
  const auto& d = *A.column(star);
  double dmax = 0.0, derr = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double x = grid->position(i).x;
    double ref = std::abs(simpson(rate, std::min(x, 0.5), std::max(x, 0.5)));
    dmax = std::max(dmax, ref);
    derr = std::max(derr, std::abs(d[i] - ref));
  }
  double drel = derr / dmax;
  GridField u0 = sample_field(grid, [](Vec x) { return x.x; });
  GridField uinf = asymptotic_profile(u0, A, M);
  SpaceTimeField evo = evolve(u0, H, B, ProblemKind::cn, 16.0, 16.0);
  double eprof = sup_diff(uinf.values, evo.values.back());
  double lim = 3.0 * (h + evo.dt);
  // eikonal: u_inf is the minimum of u0
  Hamiltonian E = Hamiltonian::eikonal(1.0);
  ActionMetric em(grid, E, B);
  ActionMatrix EA = action_matrix(em);
  GridField einf = asymptotic_profile(u0, EA, aubry_set(EA));
  double emin = *std::min_element(u0.values.begin(), u0.values.end());
  double eerr = 0.0;
  for (double v : einf.values) eerr = std::max(eerr, std::abs(v - emin));
  r.passed = localized && drel <= 0.02 && eprof <= lim && eerr <= 1e-12;
  r.detail = "mask " + std::to_string(count) + " node(s) around x*=0.5" + (localized ? "" : " NOT LOCALISED") +
             ", Agmon rel err " + fmt("%.2e", drel) + ", |u_inf-u(16)|=" + fmt("%.4f", eprof) + " (limit " +
             fmt("%.4f", lim) + "), eikonal |u_inf-min u0|=" + fmt("%.1e", eerr);
}

// ---------------------------------------------------------------- 7
void duality(Result& r) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Hamiltonian> Hs{cosine_well(), Hamiltonian::eikonal(1.0, Expr::parse("0.5*x", {"x", "y"})),
                              Hamiltonian::double_well(), Hamiltonian::polynomial({0.0, 0.5, 0.0, 0.0, 0.25})};
  std::vector<BoundaryModel> Bs{
      BoundaryModel::neumann(Expr::parse("0.2*x", {"x", "y"})),
      BoundaryModel::affine(1.5, 0.0, Expr::constant(0.3)),
      BoundaryModel::max_affine({{1.0, 0.0, Expr::constant(1.0)}, {2.0, 0.0, Expr::constant(3.0)}}),
      BoundaryModel::user(Expr::parse("pn + 0.25*pn*pn/(1+pn*pn)", {"x", "y", "pn", "pt"}), 1.0, 1.5, false)};
  const int N = 10000;
  const double tol = 1e-9;
  long viol = 0, checks = 0;
  ConjugateOptions co;
  co.samples_1d = 801;
  for (const auto& H : Hs)
    for (int k = 0; k < N; ++k) {
      Vec x{0.5 * (U(rng) + 1.0), 0.0}, p{2.0 * U(rng), 0.0}, xi{2.0 * U(rng), 0.0};
      double L = lagrangian(H, 1, x, xi, co);
      ++checks;
      if (H(x, p) + L < xi.x * p.x - tol * (1.0 + std::abs(xi.x * p.x))) ++viol;
    }
  for (const auto& B : Bs)
    for (int k = 0; k < N; ++k) {
      Vec x{k % 2 ? 1.0 : 0.0, 0.0}, n{k % 2 ? 1.0 : -1.0, 0.0};
      Vec p{3.0 * U(rng), 0.0}, xi{2.0 * U(rng), 0.0};
      double G = boundary_conjugate(B, 1, x, n, xi, co);
      ++checks;
      if (B(x, n, p, 1) + G < xi.x * p.x - tol * (1.0 + std::abs(xi.x * p.x))) ++viol;
    }
  // affine B: Moreau envelope and selection in closed form
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    double a = 1.0 + U(rng) * 0.5 + 0.5, b = U(rng), g0 = U(rng);
    BoundaryModel B = BoundaryModel::affine(a, b, Expr::constant(g0));
    double th = kPi * U(rng);
    Vec n{std::cos(th), std::sin(th)}, x = n;
    Vec gamma = a * n + b * perp(n);
    Vec p{3.0 * U(rng), 3.0 * U(rng)};
    double delta = 0.01 + 0.2 * (U(rng) + 1.0);
    MoreauResult m = moreau(B, 2, x, n, p, delta);
    worst = std::max(worst, std::abs(m.value - (dot(gamma, p) - g0 - 0.5 * delta * norm2(gamma))));
    worst = std::max(worst, norm(m.gradient - gamma));
    Selection s = ObliqueSelection(B, 2, delta).at(x, n);
    worst = std::max({worst, norm(s.gamma - gamma), std::abs(s.g - g0)});
  }
  r.passed = viol == 0 && worst <= 1e-12;
  r.detail = std::to_string(checks) + " Fenchel-Young checks, " + std::to_string(viol) +
             " violations; affine Moreau/selection max error " + fmt("%.1e", worst);
}

struct Spec {
  int id;
  const char* title;
  double budget;
  void (*fn)(Result&);
};

const Spec kSpecs[] = {
    {1, "nonconvex eigenvalue c = 1", 60, eigenvalue},
    {2, "comparison and contraction", 120, comparison},
    {3, "large-time convergence and mu traces", 300, large_time},
    {4, "representation cross-check", 300, representation},
    {5, "Skorokhod bounds and sticking oracle", 30, skorokhod},
    {6, "weak-KAM formula", 180, weak_kam},
    {7, "conjugate duality", 10, duality},
};

}  // namespace

Result run(int id) {
  for (const auto& s : kSpecs) {
    if (s.id != id) continue;
    Result r;
    r.id = id;
    r.title = s.title;
    r.budget = s.budget;
    auto t0 = Clock::now();
    try {
      s.fn(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (r.seconds > r.budget) {
      r.passed = false;
      r.detail += " [over runtime budget]";
    }
    return r;
  }
  throw ConfigError("no acceptance criterion " + std::to_string(id));
}

std::vector<Result> run_all(const std::function<void(const Result&)>& on_result) {
  std::vector<Result> out;
  for (const auto& s : kSpecs) {
    out.push_back(run(s.id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_line(const Result& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %d. %s (%.1fs / %.0fs): ", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.seconds, r.budget);
  return head + r.detail;
}

}  // namespace hjn::acceptance
