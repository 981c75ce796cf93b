#include "hjn/weak_kam.hpp"

#include <algorithm>
#include <cmath>

#include "hjn/conjugate.hpp"
#include "hjn/variational.hpp"

namespace hjn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// inf_{0 < s <= S} (phi*(s) - V) / s; phi* convex so the ratio is quasi-convex
double travel_rate(const RadialProfile& phi, double V) {
  auto f = [&](double s) { return (phi.conjugate(s) - V) / s; };
  double S = phi.conjugate_domain();
  if (!std::isfinite(S)) {
    S = 1.0;
    for (int it = 0; it < 60 && f(2.0 * S) < f(S); ++it) S *= 2.0;
    S *= 2.0;
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = S;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14 * S; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double best = std::min(fc, fd);
  if (std::isfinite(phi.conjugate(S))) best = std::min(best, f(S));
  return best;
}

// min over l >= 0 of phi*(l |gamma|) - V + l g: cost rate of resting on the boundary
double stay_rate(const RadialProfile& phi, double V, Vec gamma, double g) {
  double best = kInf;
  const double gn = norm(gamma);
  for (int k = 0; k <= 400; ++k) {
    double l = k == 0 ? 0.0 : std::ldexp(1.0, -20) * std::pow(2.0, k / 10.0);
    double v = phi.conjugate(l * gn) - V + l * g;
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

ActionMetric::ActionMetric(GridPtr grid, const Hamiltonian& H, const BoundaryModel& B) : grid_(std::move(grid)) {
  const Grid& G = *grid_;
  const std::size_t n = G.size();
  m_.resize(n);
  const auto& phi = H.profile();
  const double tol = 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    double V = H.potential(G.position(i));
    double m = travel_rate(phi, V);
    if (m < -tol)
      throw NumericalError("action metric: negative travel cost at node " + std::to_string(i) +
                           "; normalise the models with the ergodic constant first");
    m_[i] = std::max(m, 0.0);
  }
  ObliqueSelection sel(B, G.dim());
  for (int b : G.boundary_nodes()) {
    Selection s = sel.at(G.position(b), G.normal(b));
    double r = stay_rate(phi, H.potential(G.position(b)), s.gamma, s.g);
    if (r < -tol)
      throw NumericalError("action metric: negative-cost boundary loop at node " + std::to_string(b) +
                           "; normalise the models with the ergodic constant first");
  }
  v_max_ = make_control_set(G, H, B).v_max;

  adj_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto c = G.cell(i);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if ((dx == 0 && dy == 0) || (G.dim() == 1 && dy != 0)) continue;
        int j = G.node_at(c[0] + dx, c[1] + dy);
        if (j < 0) continue;
        adj_[i].push_back({j, G.h() * std::sqrt(double(dx * dx + dy * dy))});
      }
  }
  std::vector<int> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = static_cast<int>(i);
  const int combos = G.dim() == 1 ? 2 : 4;
  for (int o = 0; o < combos; ++o) {
    int sx = (o & 1) ? -1 : 1, sy = (o & 2) ? -1 : 1;
    auto ord = base;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      auto ca = G.cell(a), cb = G.cell(b);
      if (ca[1] != cb[1]) return sy * ca[1] < sy * cb[1];
      return sx * ca[0] < sx * cb[0];
    });
    orders_.push_back(std::move(ord));
  }
}

std::vector<double> distance_from(const ActionMetric& metric, int y) {
  const std::size_t n = metric.grid().size();
  if (y < 0 || static_cast<std::size_t>(y) >= n) throw ConfigError("distance: source node out of range");
  std::vector<double> d(n, kInf);
  d[y] = 0.0;
  const auto& orders = metric.sweep_orders();
  // converged once every ordering has passed once without an update
  std::size_t quiet = 0;
  for (std::size_t sweep = 0; quiet < orders.size(); ++sweep) {
    if (sweep > 100000) throw NotConverged("distance: sweeping did not settle", {});
    bool changed = false;
    for (int i : orders[sweep % orders.size()]) {
      if (i == y) continue;
      for (const auto& e : metric.edges(i)) {
        double c = d[e.to] + metric.edge_cost(i, e);
        if (c < d[i]) {
          d[i] = c;
          changed = true;
        }
      }
    }
    quiet = changed ? 0 : quiet + 1;
  }
  for (double v : d)
    if (!std::isfinite(v)) throw GeometryError("distance: grid is not connected");
  return d;
}

const std::vector<double>* ActionMatrix::column(int y) const {
  auto it = std::find(sources.begin(), sources.end(), y);
  return it == sources.end() ? nullptr : &d[it - sources.begin()];
}

ActionMatrix action_matrix(const ActionMetric& metric, std::vector<int> sources, Exec exec) {
  const std::size_t n = metric.grid().size();
  if (sources.empty()) {
    if (n > 2000) throw ConfigError("action matrix: more than 2000 nodes, pass an explicit source list");
    for (std::size_t i = 0; i < n; ++i) sources.push_back(static_cast<int>(i));
  }
  ActionMatrix A;
  A.grid = metric.grid_ptr();
  A.sources = std::move(sources);
  A.d.resize(A.sources.size());
  A.rate.resize(n);
  for (std::size_t i = 0; i < n; ++i) A.rate[i] = metric.rate(i);
  A.v_max = metric.v_max();
  const long K = static_cast<long>(A.sources.size());
  if (exec == Exec::serial) {
    for (long k = 0; k < K; ++k) A.d[k] = distance_from(metric, A.sources[k]);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < K; ++k) A.d[k] = distance_from(metric, A.sources[k]);
  }
  return A;
}

AubryMask aubry_set(const ActionMatrix& action, double tol) {
  const Grid& G = *action.grid;
  const double h = G.h();
  AubryMask M;
  M.tol = std::isnan(tol) ? 5.0 * (h + h / action.v_max) : tol;
  M.mask.assign(G.size(), 0);
  M.residual.assign(G.size(), std::numeric_limits<double>::quiet_NaN());
  int best = -1;
  for (std::size_t k = 0; k < action.sources.size(); ++k) {
    int y = action.sources[k];
    const auto& dy = action.d[k];
    // cheapest discrete loop through y: leave to a neighbour j, come back along d(., y)
    double r = kInf;
    auto c = G.cell(y);
    for (int ddy = -1; ddy <= 1; ++ddy)
      for (int ddx = -1; ddx <= 1; ++ddx) {
        if ((ddx == 0 && ddy == 0) || (G.dim() == 1 && ddy != 0)) continue;
        int j = G.node_at(c[0] + ddx, c[1] + ddy);
        if (j < 0) continue;
        double len = h * std::sqrt(double(ddx * ddx + ddy * ddy));
        r = std::min(r, (len * std::min(action.rate[y], action.rate[j]) + dy[j]) / len);
      }
    M.residual[y] = r;
    if (r <= M.tol) M.mask[y] = 1;
    if (best < 0 || r < M.residual[best]) best = y;
  }
  if (best >= 0 && std::none_of(M.mask.begin(), M.mask.end(), [](char c) { return c != 0; })) {
    M.mask[best] = 1;
    M.forced = true;
  }
  return M;
}

GridField asymptotic_profile(const GridField& u0, const ActionMatrix& action, const AubryMask& mask) {
  const std::size_t n = action.grid->size();
  if (action.sources.size() != n) throw ConfigError("asymptotic profile needs the full action matrix");
  if (u0.values.size() != n) throw ConfigError("asymptotic profile: u0 does not match the grid");
  std::vector<int> aubry;
  for (std::size_t y = 0; y < n; ++y)
    if (mask.mask[y]) aubry.push_back(static_cast<int>(y));
  if (aubry.empty()) throw NumericalError("asymptotic profile: empty Aubry mask");
  std::vector<const std::vector<double>*> col(n);
  for (std::size_t k = 0; k < n; ++k) col[action.sources[k]] = &action.d[k];
  // u0^-(y) = min_z d(y,z) + u0(z), needed on the mask only
  std::vector<double> lower(aubry.size(), kInf);
  for (std::size_t a = 0; a < aubry.size(); ++a)
    for (std::size_t z = 0; z < n; ++z) lower[a] = std::min(lower[a], (*col[z])[aubry[a]] + u0.values[z]);
  GridField out{action.grid, std::vector<double>(n, kInf)};
  for (std::size_t a = 0; a < aubry.size(); ++a) {
    const auto& c = *col[aubry[a]];
    for (std::size_t x = 0; x < n; ++x) out.values[x] = std::min(out.values[x], c[x] + lower[a]);
  }
  return out;
}

MonotonicityTrace monotonicity_trace(const SpaceTimeField& evo, const GridField& v, double eta, double shift,
                                     bool per_node) {
  const std::size_t K = evo.times.size();
  if (K == 0) throw ConfigError("monotonicity: empty evolution");
  const std::size_t n = v.values.size();
  double gap = kInf;
  for (const auto& u : evo.values)
    for (std::size_t i = 0; i < n; ++i) gap = std::min(gap, u[i] - v.values[i]);
  MonotonicityTrace T;
  T.eta = eta;
  T.shift = shift < 0 ? 1.0 - gap : shift;
  T.s = evo.times;
  T.mu_plus.assign(K, kInf);
  T.mu_minus.assign(K, -kInf);
  if (per_node) {
    T.node_mu_plus.assign(K, std::vector<double>(n));
    T.node_mu_minus.assign(K, std::vector<double>(n));
  }
  std::vector<double> lo(K), hi(K);
  for (std::size_t i = 0; i < n; ++i) {
    const double vt = v.values[i] - T.shift;
    // suffix extrema of u(x,t) +- eta t
    double mn = kInf, mx = -kInf;
    for (std::size_t k = K; k-- > 0;) {
      double w = evo.values[k][i] - vt;
      if (w < 1.0 - 1e-12) throw NumericalError("monotonicity: u - v + shift < 1; increase the shift");
      T.C = std::max(T.C, w);
      // the t = s term is exactly 1: compare against the same rounded key
      const double kp = w + eta * evo.times[k], km = w - eta * evo.times[k];
      mn = std::min(mn, kp);
      mx = std::max(mx, km);
      double mp = 1.0 + (mn - kp) / w, mm = 1.0 + (mx - km) / w;
      T.mu_plus[k] = std::min(T.mu_plus[k], mp);
      T.mu_minus[k] = std::max(T.mu_minus[k], mm);
      if (per_node) {
        T.node_mu_plus[k][i] = mp;
        T.node_mu_minus[k][i] = mm;
      }
    }
  }
  return T;
}

}  // namespace hjn
