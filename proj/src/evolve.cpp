#include <cmath>

#include "hjn/scheme.hpp"

namespace hjn {

SpaceTimeField evolve(const GridField& u0, const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind,
                      double T, double record_every, const EvolveOptions& opt) {
  if (!(T >= 0)) throw ConfigError("evolve: T must be nonnegative");
  Scheme scheme(u0.grid, H, B, kind, opt.scheme);
  std::vector<double> u = u0.values;
  scheme.ensure_gradient_bound(scheme.gradient_bound(u));

  SpaceTimeField out;
  out.grid = u0.grid;
  out.times.push_back(0.0);
  out.values.push_back(u);
  out.dt = opt.dt > 0 ? opt.dt : scheme.dt();
  if (T == 0.0) return out;
  if (!(record_every > 0)) record_every = T;

  std::vector<double> stamps;
  long nrec = static_cast<long>(std::floor(T / record_every * (1.0 + 1e-12)));
  for (long k = 1; k <= nrec; ++k) stamps.push_back(k * record_every);
  if (stamps.empty() || std::abs(stamps.back() - T) > 1e-12 * T) stamps.push_back(T);

  double t = 0.0;
  long steps = 0;
  for (double ts : stamps) {
    while (ts - t > 1e-12 * ts) {
      double dt = opt.dt > 0 ? opt.dt : scheme.dt();
      if (dt > ts - t) dt = ts - t;
      u = scheme.step(u, dt);
      t += dt;
      if (std::abs(ts - t) <= 1e-12 * ts) t = ts;
      if (opt.on_step) opt.on_step(t, u);
      if (++steps % 16 == 0 && opt.dt <= 0) scheme.ensure_gradient_bound(scheme.gradient_bound(u));
    }
    t = ts;
    out.times.push_back(ts);
    out.values.push_back(u);
  }
  return out;
}

}  // namespace hjn
