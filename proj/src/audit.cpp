#include "hjn/audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hjn {

const AuditItem& AuditReport::item(const std::string& id) const {
  for (const auto& it : items)
    if (it.id == id) return it;
  throw Error("audit item " + id + " not present");
}

bool AuditReport::a6() const { return item("A6+").passed || item("A6-").passed; }

namespace {

std::string fmt(Vec v, int dim) {
  std::ostringstream os;
  os.precision(6);
  if (dim == 1) os << v.x;
  else os << "(" << v.x << "," << v.y << ")";
  return os.str();
}

class Sampler {
 public:
  Sampler(const Domain& d, unsigned seed) : d_(d), rng_(seed) {}

  Vec point() {
    std::uniform_real_distribution<double> ux(d_.box_lo().x, d_.box_hi().x), uy(d_.box_lo().y, d_.box_hi().y);
    for (int k = 0; k < 1000; ++k) {
      Vec x{ux(rng_), d_.dim() == 2 ? uy(rng_) : 0.0};
      if (d_.rho(x) <= 0) return x;
    }
    return d_.centroid();
  }
  Vec boundary_point() {
    if (d_.dim() == 1) return coin() ? d_.box_lo() : Vec{d_.box_hi().x, 0.0};
    return d_.snap_to_boundary(point() + Vec{1e-9, 0.0});
  }
  Vec momentum(double R) {
    std::uniform_real_distribution<double> u(-R, R);
    return {u(rng_), d_.dim() == 2 ? u(rng_) : 0.0};
  }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

 private:
  const Domain& d_;
  std::mt19937_64 rng_;
};

}  // namespace

AuditReport audit_assumptions(const Hamiltonian& H, const BoundaryModel& B, const Domain& dom,
                              const AuditOptions& opt) {
  if (opt.sample_budget < 100) throw ConfigError("audit sample_budget must be >= 100");
  const int dim = dom.dim();
  const int N = opt.sample_budget;
  const double R = opt.radius;
  Sampler S(dom, opt.seed);
  AuditReport rep;
  rep.convex_h = H.convex();
  rep.convex_b = B.convex();

  // A0: defining function with nonvanishing gradient on the boundary
  {
    AuditItem it{"A0", "bounded C1 domain: |grad rho| > 0 on the boundary"};
    it.worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < std::min(N, 500); ++k) {
      Vec b = S.boundary_point();
      double g = norm(dom.grad_rho(b));
      if (g < it.worst) {
        it.worst = g;
        it.witness = "x=" + fmt(b, dim);
      }
      ++it.samples;
    }
    it.passed = it.worst > 0;
    rep.items.push_back(it);
  }

  double vmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < N; ++k) vmin = std::min(vmin, H.potential(S.point()));
  vmin += H.offset();  // coercivity_radius subtracts the offset itself

  // A1: coercivity
  {
    AuditItem it{"A1", "coercive: inf_{|p|>=r(A)} H >= A"};
    it.worst = std::numeric_limits<double>::infinity();
    for (double A : {1.0, 10.0, 100.0}) {
      auto r = H.coercivity_radius(A, vmin);
      if (!r) {
        // witness: H decreasing along a ray
        Vec x = S.point();
        Vec p{dim == 1 ? 100.0 : 70.7106781, dim == 1 ? 0.0 : 70.7106781};
        it.passed = false;
        it.worst = H(x, p) - A;
        it.witness = "x=" + fmt(x, dim) + " p=" + fmt(p, dim) + " H=" + std::to_string(H(x, p)) + " < " +
                     std::to_string(A);
        break;
      }
      for (int k = 0; k < N / 3; ++k) {
        Vec x = S.point();
        Vec dir = S.momentum(1.0);
        if (norm(dir) == 0) continue;
        Vec p = (*r + S.uniform(0.0, 3.0)) * (dir / norm(dir));
        double m = H(x, p) - A;
        ++it.samples;
        if (m < it.worst) {
          it.worst = m;
          it.witness = "x=" + fmt(x, dim) + " p=" + fmt(p, dim);
        }
      }
    }
    if (it.passed) it.passed = it.worst >= -opt.tol;
    rep.items.push_back(it);
  }

  // A2: Lipschitz in p on B_R
  {
    AuditItem it{"A2", "|H(x,p)-H(x,q)| <= M_R |p-q| on B_R"};
    it.worst = std::numeric_limits<double>::infinity();
    double M = H.lipschitz(R * std::sqrt(static_cast<double>(dim)));
    for (int k = 0; k < N; ++k) {
      Vec x = S.point(), p = S.momentum(R), q = S.momentum(R);
      double m = M * norm(p - q) - std::abs(H(x, p) - H(x, q));
      ++it.samples;
      if (m < it.worst) {
        it.worst = m;
        it.witness = "x=" + fmt(x, dim) + " p=" + fmt(p, dim) + " q=" + fmt(q, dim);
      }
    }
    it.passed = it.worst >= -opt.tol * (1.0 + M * R);
    rep.items.push_back(it);
  }

  // A3: obliqueness, A4: Lipschitz, A5: convexity of B
  {
    AuditItem a3{"A3", "B(x,p+l n)-B(x,p) >= theta l"}, a4{"A4", "|B(x,p)-B(x,q)| <= M_B|p-q|"},
        a5{"A5", "p -> B(x,p) convex"};
    a3.worst = a4.worst = a5.worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
      Vec x = S.boundary_point();
      Vec n = dom.normal(x);
      PointBoundary pb = B.at(x, n, dim);
      Vec p = S.momentum(R), q = S.momentum(R);
      double lam = S.uniform(0.0, 2.0);
      double m3 = pb(p + lam * n) - pb(p) - B.theta() * lam;
      double m4 = B.lipschitz() * norm(p - q) - std::abs(pb(p) - pb(q));
      double m5 = 0.5 * (pb(p) + pb(q)) - pb(0.5 * (p + q));
      a3.samples = a4.samples = a5.samples = k + 1;
      if (m3 < a3.worst) a3.worst = m3, a3.witness = "x=" + fmt(x, dim) + " p=" + fmt(p, dim) + " lambda=" + std::to_string(lam);
      if (m4 < a4.worst) a4.worst = m4, a4.witness = "x=" + fmt(x, dim) + " p=" + fmt(p, dim) + " q=" + fmt(q, dim);
      if (m5 < a5.worst) a5.worst = m5, a5.witness = "x=" + fmt(x, dim) + " p=" + fmt(p, dim) + " q=" + fmt(q, dim);
    }
    a3.passed = a3.worst >= -opt.tol;
    a4.passed = a4.worst >= -opt.tol;
    a5.applicable = B.convex();
    a5.passed = !B.convex() || a5.worst >= -opt.tol;
    rep.items.push_back(a3);
    rep.items.push_back(a4);
    rep.items.push_back(a5);
  }

  // A6 / A7 are statements about the normalised Hamiltonian H - c
  const bool have_c = !std::isnan(opt.eigenvalue);
  Hamiltonian Hn = have_c ? H.shifted(opt.eigenvalue) : H;
  for (int sign : {+1, -1}) {
    AuditItem it{sign > 0 ? "A6+" : "A6-",
                 sign > 0 ? "mu H(p/mu+q) >= H(p+q) + psi(1-mu), mu in (0,1]"
                          : "mu H(p/mu+q) <= H(p+q) - psi(mu-1)/mu, mu >= 1"};
    it.applicable = have_c;
    it.worst = std::numeric_limits<double>::infinity();  // psi estimate = min ratio
    if (have_c) {
      for (int k = 0; k < 20 * N && it.samples < N; ++k) {
        Vec x = S.point(), p = S.momentum(R), q = S.momentum(R);
        double hpq = Hn(x, p + q), hq = Hn(x, q);
        if (hq > 0) continue;
        if (sign > 0 ? hpq < opt.eta : hpq > -opt.eta) continue;
        double mu = sign > 0 ? S.uniform(0.05, 0.95) : S.uniform(1.05, 20.0);
        double lhs = mu * Hn(x, p / mu + q);
        double ratio = sign > 0 ? (lhs - hpq) / (1.0 - mu) : (hpq - lhs) * mu / (mu - 1.0);
        ++it.samples;
        if (ratio < it.worst) {
          it.worst = ratio;
          it.witness = "x=" + fmt(x, dim) + " p=" + fmt(p, dim) + " q=" + fmt(q, dim) + " mu=" + std::to_string(mu);
        }
      }
      it.passed = it.samples == 0 || it.worst > opt.tol;
    }
    rep.items.push_back(it);
  }
  for (int sign : {+1, -1}) {
    AuditItem it{sign > 0 ? "A7+" : "A7-", "convex H, H(x,p+q) >= c + xi.q + omega((xi.q)_pm) on {H = c}"};
    it.applicable = have_c && H.convex();
    it.worst = std::numeric_limits<double>::infinity();  // omega estimate
    if (it.applicable) {
      const auto& prof = Hn.profile();
      for (int k = 0; k < 20 * N && it.samples < N; ++k) {
        Vec x = S.point();
        // level set of the normalised H at x: phi(r) = -V_n(x)
        double target = -Hn.potential(x);
        double hi = 1.0;
        while (prof(hi) < target && hi < 1e6) hi *= 2.0;
        if (prof(0.0) > target || prof(hi) < target) continue;
        double lo = 0.0;
        for (int it2 = 0; it2 < 200; ++it2) {
          double m = 0.5 * (lo + hi);
          (prof(m) < target ? lo : hi) = m;
        }
        double r0 = hi;
        Vec dir = S.momentum(1.0);
        if (norm(dir) == 0 || r0 == 0) continue;
        Vec p = r0 * (dir / norm(dir));
        Vec xi = prof.derivative(r0) * (p / r0);
        Vec q = S.momentum(R);
        double xq = dot(xi, q);
        if (sign * xq < 0.1) continue;
        double m = Hn(x, p + q) - Hn(x, p) - xq;
        ++it.samples;
        if (m < it.worst) {
          it.worst = m;
          it.witness = "x=" + fmt(x, dim) + " p=" + fmt(p, dim) + " q=" + fmt(q, dim);
        }
      }
      it.passed = it.samples == 0 || it.worst > opt.tol;
    } else {
      it.passed = false;
    }
    rep.items.push_back(it);
  }
  return rep;
}

}  // namespace hjn
