#include "hjn/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hjn {

int ValueTable::stamp(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return static_cast<int>(k);
  return -1;
}

ControlSet make_control_set(const Grid& grid, const Hamiltonian& H, const BoundaryModel& B, int samples,
                            int ladder) {
  if (samples < 3) throw ConfigError("control lattice needs at least 3 samples");
  ControlSet cs;
  const auto& phi = H.profile();
  double V = phi.conjugate_domain();
  if (!std::isfinite(V)) {
    double hmax = 0.0, vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double v = H.potential(grid.position(i));
      hmax = std::max(hmax, std::abs(phi(0.0) + v));
      vmin = std::min(vmin, v);
    }
    auto r = H.coercivity_radius(2.0 * hmax + 2.0, vmin + H.offset());
    if (!r) throw ConfigError("control set: Hamiltonian is not coercive");
    V = 1.0 + *r;
  }
  if (!(V > 0)) throw ConfigError("control set: Lagrangian has a degenerate effective domain");
  cs.v_max = V;
  const int half = samples / 2;
  if (grid.dim() == 1) {
    cs.velocities.push_back({0.0, 0.0});
    for (int k = 1; k <= half; ++k) {
      double w = V * k / half;
      cs.velocities.push_back({w, 0.0});
      cs.velocities.push_back({-w, 0.0});
    }
  } else {
    cs.velocities.push_back({0.0, 0.0});
    const int nang = 2 * half;
    for (int k = 1; k <= half; ++k)
      for (int a = 0; a < nang; ++a) {
        double th = 2.0 * std::numbers::pi * a / nang;
        double w = V * k / half;
        cs.velocities.push_back({w * std::cos(th), w * std::sin(th)});
      }
  }
  cs.ladder.push_back(0.0);
  for (int k = 0; k < ladder; ++k) cs.ladder.push_back(V / B.theta() * std::ldexp(1.0, -(ladder - 1 - k)));
  return cs;
}

namespace {

struct Kernel {
  const Grid& grid;
  const Hamiltonian& H;
  const ObliqueSelection& sel;
  const ControlSet& cs;
  double dt;
  std::vector<double> phistar;        // phi*(|w|) per velocity
  std::vector<Selection> node_sel;    // per node (boundary only meaningful)

  Kernel(const Grid& g, const Hamiltonian& h, const ObliqueSelection& s, const ControlSet& c, double step)
      : grid(g), H(h), sel(s), cs(c), dt(step) {
    for (const Vec& w : cs.velocities) phistar.push_back(H.profile().conjugate(norm(w)));
    node_sel.resize(grid.size());
    for (int b : grid.boundary_nodes()) node_sel[b] = sel.at(grid.position(b), grid.normal(b));
  }

  // lookup(z, clock, x) returns the stored value reached after consuming `clock` time, or the
  // fractional-step value when the clock runs past t = 0
  template <class Lookup>
  double node(std::size_t i, Lookup&& lookup) const {
    const Vec x = grid.position(i);
    const double Vi = H.potential(x);
    const bool bnd = grid.is_boundary(i);
    const std::size_t nl = bnd ? cs.ladder.size() : 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cs.velocities.size(); ++k) {
      if (!std::isfinite(phistar[k])) continue;
      const double stage = dt * (phistar[k] - Vi);
      for (std::size_t j = 0; j < nl; ++j) {
        const double l = cs.ladder[j];
        Vec y = x + dt * cs.velocities[k];
        double cost = stage;
        if (l > 0) {
          y = y - (dt * l) * node_sel[i].gamma;
          cost += dt * l * node_sel[i].g;
        }
        Reflection r = reflect(grid.domain(), sel, y);
        cost += r.push * r.sel.g;
        double clock = dt * (1.0 + l) + r.push;
        best = std::min(best, lookup(x, r.landing, cost, clock));
      }
    }
    return best;
  }
};

template <class F>
void for_nodes(std::size_t n, Exec exec, F&& f) {
  const long N = static_cast<long>(n);
  if (exec == Exec::serial) {
    for (long i = 0; i < N; ++i) f(static_cast<std::size_t>(i));
    return;
  }
#pragma omp parallel for schedule(dynamic, 16) if (N > 256)
  for (long i = 0; i < N; ++i) f(static_cast<std::size_t>(i));
}

double interp_time(const ValueTable& tb, double tau, Vec z) {
  const Grid& g = *tb.grid;
  double q = tau / tb.dt;
  long j = static_cast<long>(std::floor(q + 1e-9));
  long last = static_cast<long>(tb.values.size()) - 1;
  if (j < 0) throw NumericalError("time lookup before t = 0");
  if (j >= last) {
    if (q > last + 1e-9) throw NumericalError("time lookup beyond the stored horizon");
    return g.interpolate(tb.values[last], z);
  }
  double th = q - j;
  if (th <= 1e-9) return g.interpolate(tb.values[j], z);
  return (1.0 - th) * g.interpolate(tb.values[j], z) + th * g.interpolate(tb.values[j + 1], z);
}

std::vector<double> step_cn_impl(const Kernel& K, const std::vector<double>& prev, Exec exec) {
  std::vector<double> out(K.grid.size());
  for_nodes(K.grid.size(), exec, [&](std::size_t i) {
    out[i] = K.node(i, [&](Vec, Vec z, double cost, double) { return cost + K.grid.interpolate(prev, z); });
  });
  return out;
}

std::vector<double> step_dbc_impl(const Kernel& K, const ValueTable& tb, Exec exec) {
  const double t_new = tb.times.back() + tb.dt;
  std::vector<double> out(K.grid.size());
  for_nodes(K.grid.size(), exec, [&](std::size_t i) {
    out[i] = K.node(i, [&](Vec x, Vec z, double cost, double clock) {
      double tau = t_new - clock;
      if (tau >= -1e-12 * t_new) return cost + interp_time(tb, std::max(tau, 0.0), z);
      // clock overruns t = 0: shorten the step proportionally
      double s = t_new / clock;
      Vec zs = project_to_closure(K.grid.domain(), x + s * (z - x));
      return s * cost + K.grid.interpolate(tb.values.front(), zs);
    });
  });
  return out;
}

}  // namespace

std::vector<double> dp_step_cn(const Grid& grid, const std::vector<double>& prev, const Hamiltonian& H,
                               const ObliqueSelection& sel, const ControlSet& controls, double dt, Exec exec) {
  Kernel K(grid, H, sel, controls, dt);
  return step_cn_impl(K, prev, exec);
}

std::vector<double> dp_step_dbc(const ValueTable& table, const Hamiltonian& H, const ObliqueSelection& sel,
                                const ControlSet& controls, Exec exec) {
  Kernel K(*table.grid, H, sel, controls, table.dt);
  return step_dbc_impl(K, table, exec);
}

ValueTable value(const GridField& u0, const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind, double T,
                 const ValueOptions& opt) {
  if (!(T >= 0)) throw ConfigError("value: T must be nonnegative");
  const Grid& g = *u0.grid;
  ControlSet cs = make_control_set(g, H, B, opt.samples, opt.ladder);
  ObliqueSelection sel(B, g.dim(), opt.delta);
  double dt_max = opt.dt > 0 ? opt.dt : 2.0 * g.h() / cs.v_max;
  if (dt_max * cs.v_max > 2.0 * g.h() * (1.0 + 1e-12)) throw ConfigError("value: dt * V_max must not exceed 2h");
  ValueTable tb;
  tb.grid = u0.grid;
  tb.kind = kind;
  tb.times.push_back(0.0);
  tb.values.push_back(u0.values);
  if (T == 0.0) {
    tb.dt = dt_max;
    return tb;
  }
  long nrec = opt.record_every > 0 ? std::max(1L, std::lround(T / opt.record_every)) : 1;
  long K = static_cast<long>(std::ceil(T / dt_max - 1e-9));
  K = ((K + nrec - 1) / nrec) * nrec;
  tb.dt = T / K;
  Kernel ker(g, H, sel, cs, tb.dt);
  for (long k = 1; k <= K; ++k) {
    std::vector<double> next =
        kind == ProblemKind::cn ? step_cn_impl(ker, tb.values.back(), opt.exec) : step_dbc_impl(ker, tb, opt.exec);
    tb.values.push_back(std::move(next));
    tb.times.push_back(k == K ? T : k * tb.dt);
  }
  return tb;
}

CrosscheckReport crosscheck(const ValueTable& table, const SpaceTimeField& evo) {
  if (table.grid->size() != evo.grid->size()) throw ConfigError("crosscheck: grids differ");
  CrosscheckReport rep;
  for (std::size_t k = 0; k < evo.times.size(); ++k) {
    int j = table.stamp(evo.times[k]);
    if (j < 0) throw ConfigError("crosscheck: time stamp " + std::to_string(evo.times[k]) + " not in the value table");
    double e = 0.0;
    for (std::size_t i = 0; i < evo.values[k].size(); ++i)
      e = std::max(e, std::abs(table.values[j][i] - evo.values[k][i]));
    rep.times.push_back(evo.times[k]);
    rep.errors.push_back(e);
    rep.max_error = std::max(rep.max_error, e);
  }
  rep.final_error = rep.errors.empty() ? 0.0 : rep.errors.back();
  return rep;
}

}  // namespace hjn
