#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hjn/conjugate.hpp"
#include "hjn/geometry.hpp"

namespace hjn {

struct SkorokhodTriple {
  int dim = 1;
  double dt = 0.0;
  std::vector<double> times;  // K+1 stamps
  std::vector<Vec> eta;       // K+1 points
  std::vector<Vec> v;         // K per-step controls
  std::vector<double> l;      // K intensities, l_k belongs to the landing point eta_{k+1}
  std::vector<double> f;      // K cost rates l_k g(eta_{k+1})
  std::vector<std::optional<Selection>> reflection;

  std::size_t steps() const { return v.size(); }
  Vec eta_dot(std::size_t k) const { return (eta[k + 1] - eta[k]) / dt; }
};

using Control = std::function<Vec(double)>;

struct Reflection {
  Vec landing;
  double push = 0.0;  // dt * l
  Selection sel;
  bool reflected = false;
};

// single-step rule: y outside -> z on the boundary with z = y - push * gamma(z)
Reflection reflect(const Domain& dom, const ObliqueSelection& sel, Vec y);

SkorokhodTriple integrate(const Domain& dom, const ObliqueSelection& sel, Vec x0, const Control& v, double T,
                          double dt);

struct BoundsReport {
  double max_l_ratio = 0.0;      // max l/|v|
  double max_speed_ratio = 0.0;  // max |eta_dot|/|v|
  double l_bound = 0.0;          // 1/theta
  double speed_bound = 0.0;      // 1 + M_B/theta
  double max_rho = 0.0;
  double complementarity = 0.0;  // sum of l over interior landing points
  std::vector<std::size_t> violations;
  bool ok() const { return violations.empty() && max_rho <= 1e-10 && complementarity == 0.0; }
};

BoundsReport verify_bounds(const SkorokhodTriple& tr, const Domain& dom, double theta, double lip,
                           double tol = 1e-6);

// l G(eta, (v - eta_dot)/l), zero where l = 0
std::vector<double> cost_track(const SkorokhodTriple& tr, const Domain& dom, const BoundaryModel& B,
                               const ConjugateOptions& opt = {});

}  // namespace hjn
