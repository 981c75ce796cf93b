#include "hjn/conjugate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace hjn {

namespace {

struct Scan {
  double best = -std::numeric_limits<double>::infinity();
  Vec arg;
  bool edge = false;
  std::vector<Vec> candidates;
  double step = 0.0;
};

Scan scan(int dim, const std::function<double(Vec)>& f, Vec xi, double R, const ConjugateOptions& opt) {
  const int n = dim == 1 ? opt.samples_1d : opt.samples_2d;
  const int ny = dim == 1 ? 1 : n;
  Scan s;
  s.step = 2.0 * R / (n - 1);
  std::vector<double> val(static_cast<std::size_t>(n) * ny);
  auto coord = [&](int i) { return -R + s.step * i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < n; ++i) {
      Vec p{coord(i), dim == 1 ? 0.0 : coord(j)};
      double v = dot(xi, p) - f(p);
      val[static_cast<std::size_t>(j) * n + i] = v;
      double tol = 1e-12 * (1.0 + std::abs(v));
      // ties go to the smallest |p| so flat maxima are not mistaken for growth
      if (v > s.best + tol) {
        s.best = v;
        s.arg = p;
      } else if (v >= s.best - tol && norm2(p) < norm2(s.arg)) {
        s.best = std::max(s.best, v);
        s.arg = p;
      }
    }
  s.best = dot(xi, s.arg) - f(s.arg);
  for (int a = 0; a < dim; ++a)
    if (std::abs(s.arg[a]) >= R - 0.5 * s.step) s.edge = true;

  // other lattice local maxima close to the best are refined too (nonconvex f)
  std::vector<std::pair<double, Vec>> tops;
  double floor_v = s.best - 1e-3 * (1.0 + std::abs(s.best));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < n; ++i) {
      double v = val[static_cast<std::size_t>(j) * n + i];
      if (v < floor_v) continue;
      bool local = true;
      for (int dj = (dim == 1 ? 0 : -1); dj <= (dim == 1 ? 0 : 1) && local; ++dj)
        for (int di = -1; di <= 1; ++di) {
          int ii = i + di, jj = j + dj;
          if ((di == 0 && dj == 0) || ii < 0 || ii >= n || jj < 0 || jj >= ny) continue;
          if (val[static_cast<std::size_t>(jj) * n + ii] > v) {
            local = false;
            break;
          }
        }
      if (local) tops.push_back({v, Vec{coord(i), dim == 1 ? 0.0 : coord(j)}});
    }
  std::sort(tops.begin(), tops.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  s.candidates.push_back(s.arg);
  for (std::size_t k = 0; k < tops.size() && s.candidates.size() < 8; ++k) s.candidates.push_back(tops[k].second);
  return s;
}

double golden_max(const std::function<double(double)>& g, double a, double b, double& arg) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double best = g(arg), best_t = arg;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 80 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (gc > best) best = gc, best_t = c;
    if (gd > best) best = gd, best_t = d;
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  if (gc > best) best = gc, best_t = c;
  if (gd > best) best = gd, best_t = d;
  arg = best_t;
  return best;
}

double refine(int dim, const std::function<double(Vec)>& f, Vec xi, double R, const Scan& s, Vec& arg) {
  double best = s.best;
  arg = s.arg;
  for (Vec start : s.candidates) {
    Vec p = start;
    double v = dot(xi, p) - f(p);
    for (int pass = 0; pass < 2; ++pass)
      for (int a = 0; a < dim; ++a) {
        double t = p[a];
        auto g = [&](double z) {
          Vec q = p;
          q[a] = z;
          return dot(xi, q) - f(q);
        };
        v = golden_max(g, std::max(-R, t - s.step), std::min(R, t + s.step), t);
        p[a] = t;
      }
    if (v > best) {
      best = v;
      arg = p;
    }
  }
  return best;
}

}  // namespace

SupResult lattice_sup(int dim, const std::function<double(Vec)>& f, Vec xi, const ConjugateOptions& opt) {
  const double R = opt.radius;
  Scan s = scan(dim, f, xi, R, opt);
  SupResult out;
  out.value = refine(dim, f, xi, R, s, out.argmax);
  if (!s.edge) return out;
  Scan s2 = scan(dim, f, xi, 2.0 * R, opt);
  if (!s2.edge)
    throw NumericalError("radius too small: conjugate maximiser lies beyond radius " + std::to_string(R));
  if (s2.best > s.best + 1e-9 * (1.0 + std::abs(s.best))) {
    out.value = opt.cap;
    out.capped = true;
    out.argmax = s2.arg;
  }
  return out;
}

double lagrangian(const Hamiltonian& H, int dim, Vec x, Vec xi, const ConjugateOptions& opt) {
  auto f = [&](Vec p) { return H(x, p); };
  return lattice_sup(dim, f, xi, opt).value;
}

double boundary_conjugate(const BoundaryModel& B, int dim, Vec x, Vec n, Vec xi, const ConjugateOptions& opt) {
  PointBoundary pb = B.at(x, n, dim);
  auto f = [&](Vec p) { return pb(p); };
  return lattice_sup(dim, f, xi, opt).value;
}

namespace {

// dual of the prox of a max of affine pieces: maximise over the simplex
//   D(l) = sum l_k b_k - delta/2 |sum l_k gamma_k|^2,  b_k = gamma_k.p - g_k
// by enumerating supports of size <= dim + 1 (Caratheodory)
MoreauResult moreau_affine(const PointBoundary& B, int dim, Vec p, double delta) {
  const int K = static_cast<int>(B.gamma.size());
  std::vector<double> b(K);
  for (int k = 0; k < K; ++k) b[k] = dot(B.gamma[k], p) - B.g[k];
  double bestD = -std::numeric_limits<double>::infinity();
  Vec bestG;
  const int max_support = std::min(K, dim + 1);
  std::vector<int> S;
  auto consider = [&]() {
    const int m = static_cast<int>(S.size());
    Vec G;
    std::vector<double> lam(m);
    if (m == 1) {
      lam[0] = 1.0;
      G = B.gamma[S[0]];
    } else {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
      Eigen::VectorXd r(m + 1);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) A(i, j) = delta * dot(B.gamma[S[i]], B.gamma[S[j]]);
        A(i, m) = 1.0;
        A(m, i) = 1.0;
        r(i) = b[S[i]];
      }
      r(m) = 1.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd sol = lu.solve(r);
      for (int i = 0; i < m; ++i) {
        if (sol(i) < -1e-14) return;
        lam[i] = std::max(0.0, sol(i));
        G = G + lam[i] * B.gamma[S[i]];
      }
    }
    double D = -0.5 * delta * norm2(G);
    for (int i = 0; i < m; ++i) D += lam[i] * b[S[i]];
    if (D > bestD) {
      bestD = D;
      bestG = G;
    }
  };
  // supports of size 1..max_support in lexicographic order
  std::function<void(int)> rec = [&](int start) {
    if (!S.empty()) consider();
    if (static_cast<int>(S.size()) == max_support) return;
    for (int k = start; k < K; ++k) {
      S.push_back(k);
      rec(k + 1);
      S.pop_back();
    }
  };
  rec(0);
  MoreauResult out;
  out.gradient = bestG;
  out.prox = p - delta * bestG;
  out.value = B(out.prox) + 0.5 * delta * norm2(bestG);
  return out;
}

MoreauResult moreau_numeric(const PointBoundary& B, int dim, Vec p, double delta, double lip) {
  double R = 1.1 * delta * lip + 1e-12;
  Vec c = p;
  double prev = std::numeric_limits<double>::infinity();
  double best = prev;
  Vec arg = p;
  std::vector<double> hist;
  const int n = dim == 1 ? 401 : 41;
  for (int round = 0; round < 14; ++round) {
    double step = 2.0 * R / (n - 1);
    for (int j = 0; j < (dim == 1 ? 1 : n); ++j)
      for (int i = 0; i < n; ++i) {
        Vec q{c.x - R + step * i, dim == 1 ? 0.0 : c.y - R + step * j};
        double v = B(q) + norm2(p - q) / (2.0 * delta);
        if (v < best) {
          best = v;
          arg = q;
        }
      }
    hist.push_back(best);
    c = arg;
    R = 2.0 * step;
    prev = hist.size() > 1 ? hist[hist.size() - 2] : prev;
  }
  if (std::abs(prev - best) > 1e-10 * (1.0 + std::abs(best)))
    throw NotConverged("moreau inner minimisation not converged", hist);
  MoreauResult out;
  out.value = best;
  out.prox = arg;
  out.gradient = (p - arg) / delta;
  return out;
}

}  // namespace

MoreauResult moreau(const PointBoundary& B, int dim, Vec p, double delta, double lip) {
  if (!(delta > 0)) throw NumericalError("moreau: delta must be positive");
  return B.piecewise_affine() ? moreau_affine(B, dim, p, delta) : moreau_numeric(B, dim, p, delta, lip);
}

MoreauResult moreau(const BoundaryModel& B, int dim, Vec x, Vec n, Vec p, double delta) {
  return moreau(B.at(x, n, dim), dim, p, delta, B.lipschitz());
}

ObliqueSelection::ObliqueSelection(BoundaryModel B, int dim, double delta, std::function<Vec(Vec)> psi)
    : B_(std::move(B)), dim_(dim), delta_(delta), psi_(std::move(psi)) {
  if (!(delta > 0)) throw ConfigError("selection delta must be positive");
}

Selection ObliqueSelection::at(Vec x, Vec n) const {
  PointBoundary pb = B_.at(x, n, dim_);
  MoreauResult m = moreau(pb, dim_, psi(x), delta_, B_.lipschitz());
  // gamma is a subgradient of B at the prox point, so this g equals G(x, gamma)
  return {m.gradient, dot(m.gradient, m.prox) - pb(m.prox)};
}

double ObliqueSelection::tightness_gap(Vec x, Vec n) const {
  Selection s = at(x, n);
  Vec q = psi(x);
  return B_(x, n, q, dim_) - (dot(s.gamma, q) - s.g);
}

double ObliqueSelection::membership_violation(Vec x, Vec n, double radius, int samples) const {
  Selection s = at(x, n);
  PointBoundary pb = B_.at(x, n, dim_);
  double worst = -std::numeric_limits<double>::infinity();
  double step = 2.0 * radius / (samples - 1);
  for (int j = 0; j < (dim_ == 1 ? 1 : samples); ++j)
    for (int i = 0; i < samples; ++i) {
      Vec p{-radius + step * i, dim_ == 1 ? 0.0 : -radius + step * j};
      worst = std::max(worst, dot(s.gamma, p) - s.g - pb(p));
    }
  return worst;
}

ObliqueSelection oblique_selection(const BoundaryModel& B, int dim, double delta, std::function<Vec(Vec)> psi) {
  return ObliqueSelection(B, dim, delta, std::move(psi));
}

}  // namespace hjn
