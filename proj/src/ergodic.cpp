#include "hjn/ergodic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

namespace hjn {

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void residual(const Scheme& s, double eps, const std::vector<double>& u, std::vector<double>& r) {
  s.apply(u, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += eps * u[i];
}

}  // namespace

std::vector<double> default_eps_schedule() { return {1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3}; }

std::vector<double> discounted_solve(const Scheme& s, double eps, const std::vector<double>& init,
                                     DiscountStats* stats, int max_iterations) {
  if (!(eps > 0 && eps < 1)) throw ConfigError("discount factor must lie in (0,1)");
  const Grid& g = s.grid();
  const std::size_t n = g.size();
  const double h = g.h();
  const double stop = eps * h * h;
  std::vector<double> u = init, r, trial, rt;
  residual(s, eps, u, r);
  double m = sup_norm(r);
  std::vector<double> hist{m};
  DiscountStats st;
  {
    std::vector<double> zero(n, 0.0), f0;
    s.apply(zero, f0);
    st.bound_limit = sup_norm(f0);
  }

  int it = 0;
  for (; it < max_iterations; ++it) {
    if (m <= 1e-14 * (1.0 + st.bound_limit)) break;
    // 1-D: exact generalized derivative of the selected flux branch (at a degenerate critical
    // point of phi any difference quotient has a bias that the 1/eps-sized step amplifies).
    // 2-D: central differences of F at u minus its mean (F ignores constants; the shift keeps the
    // perturbation resolvable when |u| ~ 1/eps). Column j touches rows j and its axis neighbours.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * (2 * g.dim() + 2));
    double mean = 0.0;
    for (double x : u) mean += x / static_cast<double>(n);
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) base[i] = u[i] - mean;
    std::vector<double> up = base, dn = base;
    if (g.dim() == 1) {
      int cols[3];
      double vals[3];
      for (std::size_t i = 0; i < n; ++i) {
        int c = s.node_jacobian_1d(i, u, cols, vals);
        for (int k = 0; k < c; ++k) trip.emplace_back(static_cast<int>(i), cols[k], vals[k]);
        trip.emplace_back(static_cast<int>(i), static_cast<int>(i), eps);
      }
    }
    for (std::size_t j = 0; j < n && g.dim() == 2; ++j) {
      double d = 1e-9 * std::max(1.0, std::abs(base[j]));
      up[j] = base[j] + d;
      dn[j] = base[j] - d;
      auto add_row = [&](std::size_t i) {
        trip.emplace_back(static_cast<int>(i), static_cast<int>(j), (s.node(i, up) - s.node(i, dn)) / (2.0 * d));
      };
      add_row(j);
      for (int a = 0; a < g.dim(); ++a)
        for (int side = 0; side < 2; ++side) {
          int k = g.neighbor(j, a, side);
          if (k >= 0) add_row(static_cast<std::size_t>(k));
        }
      up[j] = base[j];
      dn[j] = base[j];
      trip.emplace_back(static_cast<int>(j), static_cast<int>(j), eps);
    }
    Eigen::SparseMatrix<double> J(static_cast<int>(n), static_cast<int>(n));
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    bool newton_ok = lu.info() == Eigen::Success;
    Eigen::VectorXd delta;
    if (newton_ok) {
      Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<int>(n));
      delta = lu.solve(-rv);
      newton_ok = lu.info() == Eigen::Success && delta.allFinite();
    }
    double taken = 0.0;
    if (newton_ok) {
      for (double t = 1.0; t >= 1.0 / 1024; t *= 0.5) {
        trial.resize(n);
        for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * delta(static_cast<int>(i));
        residual(s, eps, trial, rt);
        double mt = sup_norm(rt);
        if (mt < (1.0 - 1e-4 * t) * m) {
          taken = t * delta.cwiseAbs().maxCoeff();
          u.swap(trial);
          r.swap(rt);
          m = mt;
          break;
        }
      }
    }
    if (taken == 0.0 && !(newton_ok && delta.cwiseAbs().maxCoeff() <= stop)) {
      // explicit damped steps contract at rate (1 - eps dt) for the monotone scheme
      double dt = s.dt();
      double moved = 0.0;
      for (int k = 0; k < 50; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          double du = -dt * r[i];
          u[i] += du;
          moved = std::max(moved, std::abs(du));
        }
        residual(s, eps, u, r);
        ++st.fallback_steps;
      }
      m = sup_norm(r);
      taken = moved;
    }
    hist.push_back(m);
    if (taken <= stop) {
      ++it;
      break;
    }
  }
  if (it >= max_iterations)
    throw NotConverged("discounted solve (eps=" + std::to_string(eps) + ") did not converge", hist);
  st.newton_iterations = it;
  st.residual = m;
  for (double x : u) st.bound = std::max(st.bound, std::abs(eps * x));
  // comparison with the residual r = eps u + F(u) gives |eps u| <= M1 + |r|
  if (st.bound > st.bound_limit + m + 1e-12 * (1.0 + st.bound_limit))
    throw NumericalError("discounted solution violates |eps u| <= M1 (" + std::to_string(st.bound) + " > " +
                         std::to_string(st.bound_limit) + ")");
  if (stats) *stats = st;
  return u;
}

GridField discounted_solve(const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind, double eps,
                           const GridField& init, const SchemeOptions& opt) {
  Scheme s(init.grid, H, B, kind, opt);
  return {init.grid, discounted_solve(s, eps, init.values)};
}

ErgodicPair ergodic_limit(GridPtr grid, const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind,
                          const std::vector<double>& schedule, const SchemeOptions& opt, double cauchy_tol) {
  if (schedule.size() < 2) throw ConfigError("eps schedule needs at least two entries");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0 && schedule[k] < 1)) throw ConfigError("eps schedule entries must lie in (0,1)");
    if (k && !(schedule[k] < schedule[k - 1])) throw ConfigError("eps schedule must be strictly decreasing");
  }
  if (schedule.back() < 1e-4) throw ConfigError("eps schedule must stay >= 1e-4");
  Scheme s(grid, H, B, kind, opt);
  ErgodicPair out;
  out.anchor = grid->nearest_node(grid->domain().centroid());
  const std::size_t x0 = static_cast<std::size_t>(out.anchor);
  std::vector<double> u(grid->size(), 0.0);
  double prev_eps = 0.0, prev_c = 0.0;
  for (double eps : schedule) {
    if (prev_eps > 0)
      for (double& x : u) x -= prev_c * (1.0 / eps - 1.0 / prev_eps);
    DiscountStats st;
    u = discounted_solve(s, eps, u, &st);
    s.ensure_gradient_bound(s.gradient_bound(u));
    out.stats.push_back(st);
    out.trace.push_back({eps, eps * u[x0]});
    out.lipschitz = std::max(out.lipschitz, s.gradient_bound(u));
    prev_c = -eps * u[x0];
    prev_eps = eps;
  }
  auto [e1, q1] = out.trace[out.trace.size() - 2];
  auto [e2, q2] = out.trace.back();
  double q0 = q2 - e2 * (q1 - q2) / (e1 - e2);
  out.c = -q0;
  if (std::abs(q1 - q2) > cauchy_tol)
    out.warning = "eps*u_eps(x0) changed by " + std::to_string(std::abs(q1 - q2)) + " over the last two entries";
  out.v.grid = grid;
  out.v.values = u;
  double anchor_value = u[x0];
  for (double& x : out.v.values) x -= anchor_value;
  std::vector<double> F;
  s.apply(out.v.values, F);
  for (double f : F) out.residual = std::max(out.residual, std::abs(f - out.c));
  return out;
}

double large_time_slope(const SpaceTimeField& evo, double t1, double t2) {
  if (!(t2 > t1)) throw ConfigError("large_time_slope needs t2 > t1");
  int k1 = evo.stamp(t1), k2 = evo.stamp(t2);
  if (k1 < 0 || k2 < 0) throw NumericalError("large_time_slope: requested stamps not in the record");
  const auto& a = evo.values[k1];
  const auto& b = evo.values[k2];
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (b[i] - a[i]);
  return -sum / static_cast<double>(a.size()) / (evo.times[k2] - evo.times[k1]);
}

std::pair<Hamiltonian, BoundaryModel> normalize(const Hamiltonian& H, const BoundaryModel& B, double c,
                                                ProblemKind kind) {
  if (c == 0.0) return {H, B};
  return {H.shifted(c), kind == ProblemKind::dbc ? B.shifted(c) : B};
}

double subsolution_defect(GridPtr grid, const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind,
                          double level, double T, const SchemeOptions& opt) {
  auto [Hn, Bn] = normalize(H, B, level, kind);
  Scheme s(grid, Hn, Bn, kind, opt);
  std::vector<double> u(grid->size(), 0.0), F;
  double best = std::numeric_limits<double>::infinity();
  double t = 0.0;
  while (true) {
    s.apply(u, F);
    double worst = -std::numeric_limits<double>::infinity();
    for (double f : F) worst = std::max(worst, f);
    best = std::min(best, worst);
    if (t >= T) break;
    double dt = s.dt();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= dt * F[i];
    t += dt;
    s.ensure_gradient_bound(s.gradient_bound(u));
  }
  return best;
}

}  // namespace hjn
