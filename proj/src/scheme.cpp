#include "hjn/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hjn {

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int SpaceTimeField::stamp(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return static_cast<int>(k);
  return -1;
}

double interior_numerical_hamiltonian(const Hamiltonian& H, Vec x, Vec pm, Vec pp, Vec sigma, int dim) {
  Vec mid = 0.5 * (pm + pp);
  double v = H(x, mid);
  for (int a = 0; a < dim; ++a) v -= sigma[a] * (pp[a] - pm[a]) * 0.5;
  return v;
}

namespace {

struct AxisRange {
  double slo, shi;  // range of p_a^2
  bool take_min;    // min when p- <= p+, max otherwise
};

AxisRange axis_range(double pm, double pp) {
  double lo = std::min(pm, pp), hi = std::max(pm, pp);
  AxisRange r;
  r.take_min = pm <= pp;
  r.slo = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
  r.shi = std::max(lo * lo, hi * hi);
  return r;
}

double ext_window(const RadialProfile& phi, double rlo, double rhi, bool take_min) {
  return take_min ? phi.min_on(rlo, rhi) : phi.max_on(rlo, rhi);
}

}  // namespace

double godunov_hamiltonian(const RadialProfile& phi, Vec pm, Vec pp, int dim) {
  AxisRange ax = axis_range(pm.x, pp.x);
  if (dim == 1) return ext_window(phi, std::sqrt(ax.slo), std::sqrt(ax.shi), ax.take_min);
  AxisRange ay = axis_range(pm.y, pp.y);
  if (ax.take_min == ay.take_min)
    return ext_window(phi, std::sqrt(ax.slo + ay.slo), std::sqrt(ax.shi + ay.shi), ax.take_min);
  // mixed: outer ext over s_x of an inner ext over a sliding r-window. Between breakpoints (range ends,
  // window ends crossing a critical radius) both window-end values are monotone in s, so the outer
  // extremum sits at a breakpoint or where two inner candidates cross (window ends, phi at critical radii).
  auto inner = [&](double s) { return ext_window(phi, std::sqrt(s + ay.slo), std::sqrt(s + ay.shi), ay.take_min); };
  std::vector<double> bp{ax.slo, ax.shi};
  for (double rc : phi.critical_points())
    for (double off : {ay.slo, ay.shi}) {
      double s = rc * rc - off;
      if (s > ax.slo && s < ax.shi) bp.push_back(s);
    }
  std::sort(bp.begin(), bp.end());
  auto fa = [&](double s) { return phi(std::sqrt(s + ay.slo)); };
  auto fb = [&](double s) { return phi(std::sqrt(s + ay.shi)); };
  std::vector<double> cand = bp;
  auto roots = [&](const auto& f, double a, double b) {
    double fa0 = f(a), fb0 = f(b);
    if (fa0 == 0.0) cand.push_back(a);
    if (fa0 * fb0 >= 0.0) return;
    for (int it = 0; it < 100 && b - a > 1e-15 * (1.0 + b); ++it) {
      double m = 0.5 * (a + b), fm = f(m);
      if ((fm < 0) == (fa0 < 0)) a = m, fa0 = fm;
      else b = m;
    }
    cand.push_back(a);
    cand.push_back(b);
  };
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    double a = bp[k], b = bp[k + 1];
    if (!(b > a)) continue;
    // f_a - f_b need not be monotone; split the piece before bracketing
    const int m = 8;
    for (int j = 0; j < m; ++j) {
      double l = a + (b - a) * j / m, r = j + 1 == m ? b : a + (b - a) * (j + 1) / m;
      roots([&](double s) { return fa(s) - fb(s); }, l, r);
      for (double rc : phi.critical_points()) {
        double c = phi(rc);
        roots([&](double s) { return fa(s) - c; }, l, r);
        roots([&](double s) { return fb(s) - c; }, l, r);
      }
    }
  }
  double best = ax.take_min ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  for (double s : cand) {
    if (s < ax.slo || s > ax.shi) continue;
    double v = inner(s);
    best = ax.take_min ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

double boundary_ghost_solve(const PointBoundary& B, Vec n, Vec t, double bracket, double tol) {
  if (B.piecewise_affine()) {
    // max_k (c_k + a_k lambda) = 0  <=>  lambda = min_k (-c_k / a_k)
    double lam = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < B.gamma.size(); ++k) {
      double a = dot(B.gamma[k], n);
      if (!(a > 0)) throw NumericalError("boundary form not oblique at the ghost node");
      double c = dot(B.gamma[k], t) - B.g[k] - B.offset;
      lam = std::min(lam, -c / a);
    }
    return lam;
  }
  auto f = [&](double l) { return B(t + l * n); };
  double L = std::max(bracket, 1e-12);
  double lo = -L, hi = L;
  double flo = f(lo), fhi = f(hi);
  while (flo > 0 || fhi < 0) {
    if (std::max(-lo, hi) > 1024.0 * L)
      throw NumericalError("ghost solve: no sign change within 2^10 bracket (obliqueness violated?)");
    if (flo > 0) lo *= 2.0, flo = f(lo);
    if (fhi < 0) hi *= 2.0, fhi = f(hi);
  }
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (lo + hi);
    double fm = f(m);
    if (std::abs(fm) <= tol || hi - lo <= 1e-15 * (1.0 + std::abs(m))) return m;
    (fm > 0 ? hi : lo) = m;
  }
  return 0.5 * (lo + hi);
}

Scheme::Scheme(GridPtr grid, Hamiltonian H, BoundaryModel B, ProblemKind kind, SchemeOptions opt)
    : grid_(std::move(grid)), H_(std::move(H)), B_(std::move(B)), kind_(kind), opt_(opt) {
  if (!(opt_.cfl > 0 && opt_.cfl <= 1)) throw ConfigError("cfl must lie in (0, 1]");
  const Grid& g = *grid_;
  V_.resize(g.size());
  pb_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    V_[i] = H_.potential(g.position(i));
    if (g.is_boundary(i)) pb_[i] = B_.at(g.position(i), g.normal(i), g.dim());
  }
  estimate_sigma(0.0);
}

void Scheme::estimate_sigma(double G) {
  // max |H| over |p| <= G, then the coercivity radius of twice that level
  const auto& phi = H_.profile();
  double hmax = 0.0, vmin = std::numeric_limits<double>::infinity();
  double plo = phi.min_on(0.0, G), phi_hi = phi.max_on(0.0, G);
  for (double v : V_) {
    hmax = std::max({hmax, std::abs(plo + v), std::abs(phi_hi + v)});
    vmin = std::min(vmin, v);
  }
  double R = G;
  if (auto r = H_.coercivity_radius(2.0 * hmax, vmin + H_.offset())) R = std::max(R, *r);
  // ghost gradients at boundary nodes
  double bmax = 0.0;
  for (int b : grid_->boundary_nodes()) bmax = std::max(bmax, std::abs(pb_[b](Vec{})));
  R = std::max(R, (bmax + B_.lipschitz() * G) / B_.theta() + G);
  radius_ = R + 1.0;
  sigma_ = std::max(H_.lipschitz(radius_), 1e-12);
}

bool Scheme::ensure_gradient_bound(double G) {
  if (G + 1.0 <= radius_) return false;
  estimate_sigma(G);
  return true;
}

double Scheme::admissible_dt() const {
  double s = sigma_;
  if (kind_ == ProblemKind::dbc) s = std::max(s, B_.lipschitz());
  return grid_->h() / (grid_->dim() * s);
}

double Scheme::gradient_bound(const std::vector<double>& u) const {
  const Grid& g = *grid_;
  double G = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < g.dim(); ++a) {
      int r = g.neighbor(i, a, 1);
      if (r >= 0) G = std::max(G, std::abs(u[r] - u[i]) / g.h());
    }
  return G;
}

double Scheme::numerical_h(std::size_t i, Vec pm, Vec pp) const {
  const int dim = grid_->dim();
  if (opt_.flux == Flux::godunov) return godunov_hamiltonian(H_.profile(), pm, pp, dim) + V_[i];
  Vec sigma{sigma_, sigma_};
  Vec mid = 0.5 * (pm + pp);
  double v = H_.profile()(norm(mid)) + V_[i];
  for (int a = 0; a < dim; ++a) v -= sigma[a] * (pp[a] - pm[a]) * 0.5;
  return v;
}

double Scheme::node(std::size_t i, const std::vector<double>& u) const {
  const Grid& g = *grid_;
  const int dim = g.dim();
  const double h = g.h();
  const double ui = u[i];
  Vec pm, pp;
  if (!g.is_boundary(i)) {
    for (int a = 0; a < dim; ++a) {
      pm[a] = (ui - u[g.neighbor(i, a, 0)]) / h;
      pp[a] = (u[g.neighbor(i, a, 1)] - ui) / h;
    }
    return numerical_h(i, pm, pp);
  }
  // inward reconstruction: central where both neighbours exist, one-sided otherwise
  Vec pin;
  int lo[2] = {-1, -1}, hi[2] = {-1, -1};
  for (int a = 0; a < dim; ++a) {
    lo[a] = g.neighbor(i, a, 0);
    hi[a] = g.neighbor(i, a, 1);
    if (lo[a] >= 0 && hi[a] >= 0) pin[a] = (u[hi[a]] - u[lo[a]]) / (2.0 * h);
    else if (hi[a] >= 0) pin[a] = (u[hi[a]] - ui) / h;
    else if (lo[a] >= 0) pin[a] = (ui - u[lo[a]]) / h;
  }
  if (kind_ == ProblemKind::dbc) return pb_[i](pin);
  Vec n = g.normal(i);
  Vec t = pin - dot(pin, n) * n;
  double bracket = 1.0 + norm(pin);
  double lam = boundary_ghost_solve(pb_[i], n, t, bracket, B_.theta() * h * h);
  Vec pg = t + lam * n;
  for (int a = 0; a < dim; ++a) {
    pm[a] = lo[a] >= 0 ? (ui - u[lo[a]]) / h : pg[a];
    pp[a] = hi[a] >= 0 ? (u[hi[a]] - ui) / h : pg[a];
  }
  return numerical_h(i, pm, pp);
}

namespace {

double dphi(const RadialProfile& phi, double p) { return p == 0.0 ? 0.0 : phi.derivative(std::abs(p)) * (p > 0 ? 1.0 : -1.0); }

// derivatives of the 1-D Godunov flux in (p-, p+); the ext over [lo, hi] is attained at an end
// (slope of phi(|p|) there) or at an interior critical point (zero)
void godunov_1d_slopes(const RadialProfile& phi, double pm, double pp, double& dm, double& dp) {
  const bool take_min = pm <= pp;
  const double lo = std::min(pm, pp), hi = std::max(pm, pp);
  auto f = [&](double p) { return phi(std::abs(p)); };
  double best = f(pm);
  int which = 0;
  auto consider = [&](double p, int w) {
    double v = f(p);
    if (take_min ? v < best : v > best) {
      best = v;
      which = w;
    }
  };
  consider(pp, 1);
  if (lo < 0.0 && hi > 0.0) consider(0.0, 2);
  for (double rc : phi.critical_points()) {
    if (rc > lo && rc < hi) consider(rc, 2);
    if (-rc > lo && -rc < hi) consider(-rc, 2);
  }
  dm = which == 0 ? dphi(phi, pm) : 0.0;
  dp = which == 1 ? dphi(phi, pp) : 0.0;
}

}  // namespace

int Scheme::node_jacobian_1d(std::size_t i, const std::vector<double>& u, int* cols, double* vals) const {
  const Grid& g = *grid_;
  if (g.dim() != 1) throw Error("node_jacobian_1d on a 2-D grid");
  const double h = g.h();
  const int lo = g.neighbor(i, 0, 0), hi = g.neighbor(i, 0, 1);
  const double ui = u[i];
  const auto& phi = H_.profile();
  int cnt = 0;
  auto put = [&](int j, double v) {
    for (int k = 0; k < cnt; ++k)
      if (cols[k] == j) {
        vals[k] += v;
        return;
      }
    cols[cnt] = j;
    vals[cnt++] = v;
  };
  if (g.is_boundary(i) && kind_ == ProblemKind::dbc) {
    // B(x, pin) with a one-sided (or central) inward difference
    double pin;
    int a = -1, b = -1;  // pin = (u_b - u_a) / (w h)
    double w = 1.0;
    if (lo >= 0 && hi >= 0) a = lo, b = hi, w = 2.0;
    else if (hi >= 0) a = static_cast<int>(i), b = hi;
    else a = lo, b = static_cast<int>(i);
    pin = (u[b] - u[a]) / (w * h);
    const PointBoundary& pb = pb_[i];
    double slope;
    if (pb.piecewise_affine()) {
      std::size_t best = 0;
      double bv = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < pb.gamma.size(); ++k) {
        double v = pb.gamma[k].x * pin - pb.g[k];
        if (v > bv) bv = v, best = k;
      }
      slope = pb.gamma[best].x;
    } else {
      double d = 1e-6 * std::max(1.0, std::abs(pin));
      slope = (pb(Vec{pin + d, 0.0}) - pb(Vec{pin - d, 0.0})) / (2.0 * d);
    }
    put(b, slope / (w * h));
    put(a, -slope / (w * h));
    return cnt;
  }
  double pm, pp;
  if (g.is_boundary(i)) {
    // 1-D: no tangential part, the ghost gradient does not depend on u
    Vec n = g.normal(i);
    double lam = boundary_ghost_solve(pb_[i], n, Vec{}, 1.0, B_.theta() * h * h);
    Vec pg = lam * n;
    pm = lo >= 0 ? (ui - u[lo]) / h : pg.x;
    pp = hi >= 0 ? (u[hi] - ui) / h : pg.x;
  } else {
    pm = (ui - u[lo]) / h;
    pp = (u[hi] - ui) / h;
  }
  double dm, dp;
  if (opt_.flux == Flux::godunov) {
    godunov_1d_slopes(phi, pm, pp, dm, dp);
  } else {
    double mid = 0.5 * (pm + pp);
    dm = 0.5 * dphi(phi, mid) + 0.5 * sigma_;
    dp = 0.5 * dphi(phi, mid) - 0.5 * sigma_;
  }
  put(static_cast<int>(i), 0.0);
  if (lo >= 0) {
    put(static_cast<int>(i), dm / h);
    put(lo, -dm / h);
  }
  if (hi >= 0) {
    put(static_cast<int>(i), -dp / h);
    put(hi, dp / h);
  }
  return cnt;
}

void Scheme::apply(const std::vector<double>& u, std::vector<double>& out) const {
  const long n = static_cast<long>(size());
  out.resize(n);
  if (opt_.exec == Exec::serial) {
    for (long i = 0; i < n; ++i) out[i] = node(static_cast<std::size_t>(i), u);
    return;
  }
#pragma omp parallel for schedule(static) if (n > 4096)
  for (long i = 0; i < n; ++i) out[i] = node(static_cast<std::size_t>(i), u);
}

std::vector<double> Scheme::apply(const std::vector<double>& u) const {
  std::vector<double> out;
  apply(u, out);
  return out;
}

std::vector<double> Scheme::step(const std::vector<double>& u, double dt) const {
  double adm = admissible_dt();
  if (dt > adm * (1.0 + 1e-12)) throw CflViolation(dt, adm);
  std::vector<double> F;
  apply(u, F);
  for (std::size_t i = 0; i < F.size(); ++i) F[i] = u[i] - dt * F[i];
  return F;
}

namespace {

GridField step_kind(const GridField& u, const Hamiltonian& H, const BoundaryModel& B, double dt,
                    const SchemeOptions& opt, ProblemKind kind) {
  Scheme s(u.grid, H, B, kind, opt);
  s.ensure_gradient_bound(s.gradient_bound(u.values));
  return {u.grid, s.step(u.values, dt)};
}

}  // namespace

GridField step_cn(const GridField& u, const Hamiltonian& H, const BoundaryModel& B, double dt,
                  const SchemeOptions& opt) {
  return step_kind(u, H, B, dt, opt, ProblemKind::cn);
}

GridField step_dbc(const GridField& u, const Hamiltonian& H, const BoundaryModel& B, double dt,
                   const SchemeOptions& opt) {
  return step_kind(u, H, B, dt, opt, ProblemKind::dbc);
}

GridField sample_field(GridPtr grid, const std::function<double(Vec)>& f) {
  GridField out{grid, std::vector<double>(grid->size())};
  for (std::size_t i = 0; i < grid->size(); ++i) out.values[i] = f(grid->position(i));
  return out;
}

}  // namespace hjn
