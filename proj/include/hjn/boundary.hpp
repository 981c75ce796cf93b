#pragma once

#include <string>
#include <vector>

#include "hjn/core.hpp"
#include "hjn/expr.hpp"

namespace hjn {

// gamma = a n + b tau with tau the rotated normal; B_k(x,p) = gamma.p - g(x)
struct AffineForm {
  double normal_coef = 1.0;
  double tangent_coef = 0.0;
  Expr g;
};

enum class BoundaryKind { neumann, affine, max_affine, user };

// B frozen at one boundary point: either a max of affine pieces or a user form in (pn, pt)
struct PointBoundary {
  std::vector<Vec> gamma;
  std::vector<double> g;
  const Expr* user = nullptr;
  Vec x, n, tau;
  double offset = 0.0;

  bool piecewise_affine() const { return user == nullptr; }
  double operator()(Vec p) const;
};

class BoundaryModel {
 public:
  BoundaryModel() : name_("neumann"), forms_{AffineForm{}} {}

  static BoundaryModel neumann(Expr g = Expr::constant(0.0));
  static BoundaryModel affine(double a, double b, Expr g);
  static BoundaryModel max_affine(std::vector<AffineForm> forms);
  // form in variables x, y, pn, pt
  static BoundaryModel user(Expr form, double theta, double lip, bool convex);

  BoundaryKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<AffineForm>& forms() const { return forms_; }
  const Expr& user_form() const { return user_; }

  // in 1-D there is no tangent direction (pass dim = 1)
  PointBoundary at(Vec x, Vec n, int dim = 2) const;
  double operator()(Vec x, Vec n, Vec p, int dim = 2) const { return at(x, n, dim)(p); }

  double theta() const { return theta_; }
  double lipschitz() const { return lip_; }
  bool convex() const { return convex_; }
  double offset() const { return offset_; }
  BoundaryModel shifted(double c) const;

 private:
  BoundaryKind kind_ = BoundaryKind::neumann;
  std::string name_;
  std::vector<AffineForm> forms_;
  Expr user_;
  double theta_ = 1.0;
  double lip_ = 1.0;
  bool convex_ = true;
  double offset_ = 0.0;
};

}  // namespace hjn
