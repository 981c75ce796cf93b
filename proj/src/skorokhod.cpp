#include "hjn/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hjn {

namespace {

// smallest m >= 0 with rho(y - m gamma) <= 0, returned on the inside
double push_to_boundary(const Domain& dom, Vec y, Vec gamma, double scale) {
  if (dom.kind() == DomainKind::disc) {
    // |y - m gamma - c| = R: smaller root of a quadratic, nudged inside if rounding left it out
    Vec d = y - dom.center();
    double a = norm2(gamma), b = dot(d, gamma), c = norm2(d) - dom.radius() * dom.radius();
    double disc = b * b - a * c;
    if (a > 0 && disc >= 0) {
      double m = c / (b + std::sqrt(disc));  // = (b - sqrt(disc)) / a without cancellation
      if (std::isfinite(m) && m >= 0) {
        for (int k = 0; k < 64 && dom.rho(y - m * gamma) > 0; ++k)
          m = std::nextafter(m, std::numeric_limits<double>::infinity()) * (1.0 + 1e-16 * k);
        if (dom.rho(y - m * gamma) <= 0) return m;
      }
    }
  }
  double lo = 0.0, hi = std::max(scale, 1e-300);
  int guard = 0;
  while (dom.rho(y - hi * gamma) > 0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw NumericalError("reflection root-find: no bracket along the reflection direction");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    double m = 0.5 * (lo + hi);
    (dom.rho(y - m * gamma) > 0 ? lo : hi) = m;
  }
  return hi;
}

void check_oblique(const Domain& dom, const ObliqueSelection& sel, Vec z, Vec gamma) {
  double gn = dot(gamma, dom.normal(z));
  if (gn < 0.5 * sel.model().theta())
    throw NumericalError("obliqueness failure at (" + std::to_string(z.x) + ", " + std::to_string(z.y) +
                         "): gamma.n = " + std::to_string(gn));
}

}  // namespace

Reflection reflect(const Domain& dom, const ObliqueSelection& sel, Vec y) {
  Reflection r;
  if (dom.rho(y) <= 0) {
    r.landing = y;
    return r;
  }
  r.reflected = true;
  if (dom.kind() == DomainKind::interval) {
    Vec z = project_to_closure(dom, y);
    r.sel = sel.at(z, dom.normal(z));
    check_oblique(dom, sel, z, r.sel.gamma);
    r.push = (y.x - z.x) / r.sel.gamma.x;
    r.landing = z;
    return r;
  }
  // gamma evaluated at the landing point: fixed point z = y - m gamma(z)
  Vec z = project_to_closure(dom, y);
  for (int it = 0; it < 100; ++it) {
    Selection s = sel.at(z, dom.normal(z));
    check_oblique(dom, sel, z, s.gamma);
    double scale = std::max(dom.signed_distance(y), 1e-14) / dot(s.gamma, dom.normal(z));
    double m = push_to_boundary(dom, y, s.gamma, scale);
    Vec zn = y - m * s.gamma;
    r.sel = s;
    r.push = m;
    bool done = norm(zn - z) <= 1e-14 * (1.0 + norm(z));
    z = zn;
    if (done) break;
  }
  r.landing = z;
  return r;
}

SkorokhodTriple integrate(const Domain& dom, const ObliqueSelection& sel, Vec x0, const Control& v, double T,
                          double dt) {
  if (!(dt > 0) || !(T >= 0)) throw ConfigError("skorokhod: need dt > 0 and T >= 0");
  if (dom.rho(x0) > 1e-10) throw ConfigError("skorokhod: start point outside the closed domain");
  SkorokhodTriple tr;
  tr.dim = dom.dim();
  tr.dt = dt;
  long K = std::lround(T / dt);
  if (std::abs(K * dt - T) > 1e-9 * std::max(1.0, T)) throw ConfigError("skorokhod: T must be a multiple of dt");
  tr.times.push_back(0.0);
  tr.eta.push_back(x0);
  Vec eta = x0;
  for (long k = 0; k < K; ++k) {
    double t = k * dt;
    Vec vk = v(t);
    if (tr.dim == 1) vk.y = 0.0;
    Reflection r = reflect(dom, sel, eta + dt * vk);
    tr.v.push_back(vk);
    if (r.reflected) {
      double l = r.push / dt;
      tr.l.push_back(l);
      tr.f.push_back(l * r.sel.g);
      tr.reflection.push_back(r.sel);
    } else {
      tr.l.push_back(0.0);
      tr.f.push_back(0.0);
      tr.reflection.push_back(std::nullopt);
    }
    eta = r.landing;
    tr.eta.push_back(eta);
    tr.times.push_back((k + 1) * dt);
  }
  return tr;
}

BoundsReport verify_bounds(const SkorokhodTriple& tr, const Domain& dom, double theta, double lip, double tol) {
  BoundsReport rep;
  rep.l_bound = 1.0 / theta;
  rep.speed_bound = 1.0 + lip / theta;
  for (const Vec& e : tr.eta) rep.max_rho = std::max(rep.max_rho, dom.rho(e));
  for (std::size_t k = 0; k < tr.steps(); ++k) {
    double sv = norm(tr.v[k]);
    double se = norm(tr.eta_dot(k));
    bool bad = false;
    if (sv > 0) {
      double lr = tr.l[k] / sv, er = se / sv;
      rep.max_l_ratio = std::max(rep.max_l_ratio, lr);
      rep.max_speed_ratio = std::max(rep.max_speed_ratio, er);
      bad = lr > rep.l_bound + tol || er > rep.speed_bound + tol;
    } else {
      bad = tr.l[k] > tol || se > tol;
    }
    if (tr.l[k] < 0) bad = true;
    if (tr.l[k] > 0 && dom.signed_distance(tr.eta[k + 1]) < -1e-9) rep.complementarity += tr.l[k];
    if (bad) rep.violations.push_back(k);
  }
  return rep;
}

std::vector<double> cost_track(const SkorokhodTriple& tr, const Domain& dom, const BoundaryModel& B,
                               const ConjugateOptions& opt) {
  std::vector<double> f(tr.steps(), 0.0);
  for (std::size_t k = 0; k < tr.steps(); ++k) {
    if (tr.l[k] == 0.0) continue;
    Vec z = tr.eta[k + 1];
    Vec xi = (tr.v[k] - tr.eta_dot(k)) / tr.l[k];
    // for small l the difference quotient is mostly rounding; within that noise take the recorded gamma
    if (tr.reflection[k]) {
      double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                     (1.0 + norm(tr.eta[k]) + norm(tr.eta[k + 1]) + tr.dt * norm(tr.v[k])) / (tr.dt * tr.l[k]);
      if (norm(xi - tr.reflection[k]->gamma) <= noise) xi = tr.reflection[k]->gamma;
    }
    SupResult s = lattice_sup(tr.dim, [&, pb = B.at(z, dom.normal(z), tr.dim)](Vec p) { return pb(p); }, xi, opt);
    if (s.capped)
      throw NumericalError("cost track: reflection direction outside the effective domain of G at step " +
                           std::to_string(k));
    f[k] = tr.l[k] * s.value;
  }
  return f;
}

}  // namespace hjn
