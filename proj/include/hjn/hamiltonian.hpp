#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjn/core.hpp"
#include "hjn/expr.hpp"

namespace hjn {

// phi(r) = sum_k c_k r^k on r >= 0; every catalog Hamiltonian is phi(|p|) + V(x)
class RadialProfile {
 public:
  RadialProfile() = default;
  explicit RadialProfile(std::vector<double> coeffs);

  double operator()(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;
  const std::vector<double>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  // interior critical points of phi on (0, inf), ascending
  const std::vector<double>& critical_points() const { return crit_; }
  // extremum of phi over [lo, hi]
  double min_on(double lo, double hi) const;
  double max_on(double lo, double hi) const;
  // max |phi'| over [0, R]
  double max_slope(double R) const;
  // sup_{r>=0} (s r - phi(r)); +infinity when unbounded
  double conjugate(double s) const;
  // sup of the effective domain of the conjugate (finite only for degree <= 1)
  double conjugate_domain() const;
  bool convex_nondecreasing() const;

 private:
  std::vector<double> c_;
  std::vector<double> crit_;   // roots of phi'
  std::vector<double> crit2_;  // roots of phi''
};

class Hamiltonian {
 public:
  Hamiltonian() = default;
  Hamiltonian(std::string name, RadialProfile profile, Expr potential, double offset = 0.0);

  static Hamiltonian quadratic(double a, Expr potential = Expr::constant(0.0));
  static Hamiltonian eikonal(double speed, Expr f = Expr::constant(0.0));
  static Hamiltonian double_well();
  static Hamiltonian polynomial(std::vector<double> coeffs, Expr potential = Expr::constant(0.0));

  double operator()(Vec x, Vec p) const { return profile_(norm(p)) + potential(x); }
  // V(x) - offset
  double potential(Vec x) const { return potential_(x.x, x.y) - offset_; }
  const RadialProfile& profile() const { return profile_; }
  const std::string& name() const { return name_; }
  const Expr& potential_expr() const { return potential_; }
  double offset() const { return offset_; }

  // M_R: Lipschitz constant in p on the ball of radius R
  double lipschitz(double R) const { return profile_.max_slope(R); }
  // r such that inf_{|p| >= r} H >= level given the potential's minimum over the domain;
  // nullopt when H is not coercive
  std::optional<double> coercivity_radius(double level, double potential_min) const;
  bool coercive() const;
  bool convex() const { return profile_.convex_nondecreasing(); }
  // H - c
  Hamiltonian shifted(double c) const;
  // closed form L(x, xi) = phi*(|xi|) - V(x) + offset (infinity outside the effective domain)
  double lagrangian_exact(Vec x, Vec xi) const { return profile_.conjugate(norm(xi)) - potential(x); }

 private:
  std::string name_ = "quadratic";
  RadialProfile profile_{{0.0, 0.0, 0.5}};
  Expr potential_;
  double offset_ = 0.0;
};

}  // namespace hjn
