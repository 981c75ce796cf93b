#include "hjn/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjn {

double PointBoundary::operator()(Vec p) const {
  if (user) {
    const double v[4] = {x.x, x.y, dot(p, n), dot(p, tau)};
    return user->eval(v) - offset;
  }
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gamma.size(); ++k) m = std::max(m, dot(gamma[k], p) - g[k]);
  return m - offset;
}

BoundaryModel BoundaryModel::neumann(Expr g) {
  BoundaryModel b = max_affine({AffineForm{1.0, 0.0, std::move(g)}});
  b.kind_ = BoundaryKind::neumann;
  b.name_ = "neumann";
  return b;
}

BoundaryModel BoundaryModel::affine(double a, double bcoef, Expr g) {
  BoundaryModel b = max_affine({AffineForm{a, bcoef, std::move(g)}});
  b.kind_ = BoundaryKind::affine;
  b.name_ = "affine";
  return b;
}

BoundaryModel BoundaryModel::max_affine(std::vector<AffineForm> forms) {
  if (forms.empty()) throw ConfigError("max_affine boundary needs at least one form");
  BoundaryModel b;
  b.kind_ = BoundaryKind::max_affine;
  b.name_ = "max_affine";
  b.theta_ = std::numeric_limits<double>::infinity();
  b.lip_ = 0.0;
  for (const auto& f : forms) {
    b.theta_ = std::min(b.theta_, f.normal_coef);
    b.lip_ = std::max(b.lip_, std::hypot(f.normal_coef, f.tangent_coef));
  }
  if (!(b.theta_ > 0)) throw ConfigError("boundary forms must have positive normal coefficient (obliqueness)");
  b.forms_ = std::move(forms);
  b.convex_ = true;
  return b;
}

BoundaryModel BoundaryModel::user(Expr form, double theta, double lip, bool convex) {
  if (!(theta > 0) || !(lip >= theta)) throw ConfigError("user boundary needs 0 < theta <= lip");
  BoundaryModel b;
  b.kind_ = BoundaryKind::user;
  b.name_ = "user";
  b.user_ = std::move(form);
  b.theta_ = theta;
  b.lip_ = lip;
  b.convex_ = convex;
  return b;
}

PointBoundary BoundaryModel::at(Vec x, Vec n, int dim) const {
  PointBoundary pb;
  pb.x = x;
  pb.n = n;
  pb.tau = dim == 1 ? Vec{} : perp(n);
  pb.offset = offset_;
  if (kind_ == BoundaryKind::user) {
    pb.user = &user_;
    return pb;
  }
  pb.gamma.reserve(forms_.size());
  pb.g.reserve(forms_.size());
  for (const auto& f : forms_) {
    pb.gamma.push_back(f.normal_coef * n + f.tangent_coef * pb.tau);
    pb.g.push_back(f.g(x.x, x.y));
  }
  return pb;
}

BoundaryModel BoundaryModel::shifted(double c) const {
  BoundaryModel b = *this;
  b.offset_ += c;
  return b;
}

}  // namespace hjn
