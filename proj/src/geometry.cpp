#include "hjn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hjn {

Domain Domain::interval(double a, double b) {
  if (!(b > a)) throw GeometryError("interval needs a < b");
  Domain d;
  d.dim_ = 1;
  d.kind_ = DomainKind::interval;
  d.lo_ = {a, 0.0};
  d.hi_ = {b, 0.0};
  d.center_ = {0.5 * (a + b), 0.0};
  return d;
}

Domain Domain::rectangle(Vec lo, Vec hi) {
  if (!(hi.x > lo.x && hi.y > lo.y)) throw GeometryError("rectangle needs lo < hi on both axes");
  Domain d;
  d.dim_ = 2;
  d.kind_ = DomainKind::rectangle;
  d.lo_ = lo;
  d.hi_ = hi;
  d.center_ = 0.5 * (lo + hi);
  return d;
}

Domain Domain::disc(Vec center, double radius) {
  if (!(radius > 0)) throw GeometryError("disc radius must be positive");
  Domain d;
  d.dim_ = 2;
  d.kind_ = DomainKind::disc;
  d.center_ = center;
  d.radius_ = radius;
  d.lo_ = {center.x - radius, center.y - radius};
  d.hi_ = {center.x + radius, center.y + radius};
  return d;
}

Domain Domain::custom(int dim, Expr rho, Vec box_lo, Vec box_hi) {
  if (dim != 1 && dim != 2) throw GeometryError("dimension must be 1 or 2");
  Domain d;
  d.dim_ = dim;
  d.kind_ = DomainKind::custom;
  d.rho_expr_ = std::move(rho);
  d.lo_ = box_lo;
  d.hi_ = box_hi;
  if (dim == 1) d.lo_.y = d.hi_.y = 0.0;
  d.center_ = 0.5 * (d.lo_ + d.hi_);
  return d;
}

double Domain::rho(Vec x) const {
  switch (kind_) {
    case DomainKind::interval:
      return (x.x - lo_.x) * (x.x - hi_.x) / (hi_.x - lo_.x);
    case DomainKind::rectangle: {
      double rx = (x.x - lo_.x) * (x.x - hi_.x) / (hi_.x - lo_.x);
      double ry = (x.y - lo_.y) * (x.y - hi_.y) / (hi_.y - lo_.y);
      return std::max(rx, ry);
    }
    case DomainKind::disc:
      return norm2(x - center_) - radius_ * radius_;
    case DomainKind::custom:
      return rho_expr_(x.x, dim_ == 1 ? 0.0 : x.y);
  }
  return 0.0;
}

Vec Domain::grad_rho(Vec x) const {
  switch (kind_) {
    case DomainKind::interval:
      return {(2.0 * x.x - lo_.x - hi_.x) / (hi_.x - lo_.x), 0.0};
    case DomainKind::rectangle: {
      double rx = (x.x - lo_.x) * (x.x - hi_.x) / (hi_.x - lo_.x);
      double ry = (x.y - lo_.y) * (x.y - hi_.y) / (hi_.y - lo_.y);
      double m = std::max(rx, ry);
      Vec g;
      // corners: both terms active, gradient sum gives the averaged normal
      if (rx >= m - 1e-12) g.x = (2.0 * x.x - lo_.x - hi_.x) / (hi_.x - lo_.x);
      if (ry >= m - 1e-12) g.y = (2.0 * x.y - lo_.y - hi_.y) / (hi_.y - lo_.y);
      return g;
    }
    case DomainKind::disc:
      return 2.0 * (x - center_);
    case DomainKind::custom: {
      double scale = std::max(1.0, diameter());
      double e = 1e-6 * scale;
      Vec g;
      g.x = (rho({x.x + e, x.y}) - rho({x.x - e, x.y})) / (2 * e);
      if (dim_ == 2) g.y = (rho({x.x, x.y + e}) - rho({x.x, x.y - e})) / (2 * e);
      return g;
    }
  }
  return {};
}

Vec Domain::normal(Vec x) const {
  Vec g = grad_rho(x);
  double n = norm(g);
  if (!(n > 0)) throw GeometryError("vanishing gradient of the defining function");
  return g / n;
}

double Domain::signed_distance(Vec x) const {
  switch (kind_) {
    case DomainKind::interval:
      return std::max(lo_.x - x.x, x.x - hi_.x);
    case DomainKind::rectangle: {
      double dx = std::max(lo_.x - x.x, x.x - hi_.x);
      double dy = std::max(lo_.y - x.y, x.y - hi_.y);
      if (dx > 0 || dy > 0) return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
      return std::max(dx, dy);
    }
    case DomainKind::disc:
      return norm(x - center_) - radius_;
    case DomainKind::custom: {
      double g = norm(grad_rho(x));
      if (!(g > 0)) return rho(x) > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      return rho(x) / g;
    }
  }
  return 0.0;
}

Vec Domain::centroid() const { return center_; }

double Domain::diameter() const {
  if (kind_ == DomainKind::disc) return 2.0 * radius_;
  return norm(hi_ - lo_);
}

namespace {

// bisection for rho along x + s*dir; returns the endpoint with rho <= 0
Vec root_along(const Domain& d, Vec x, Vec dir, double step, double max_step, const char* what) {
  double a = 0.0;
  double fa = d.rho(x);
  if (fa == 0.0) return x;
  double b = step;
  double fb = d.rho(x + b * dir);
  while ((fa > 0) == (fb > 0)) {
    if (b > max_step)
      throw GeometryError(std::string(what) + ": no root of rho along the line; last bracket [" +
                          std::to_string(a) + ", " + std::to_string(b) + "]");
    a = b;
    fa = fb;
    b *= 2.0;
    fb = d.rho(x + b * dir);
  }
  for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * (1.0 + std::abs(b)); ++it) {
    double m = 0.5 * (a + b);
    double fm = d.rho(x + m * dir);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return fa <= 0 ? x + a * dir : x + b * dir;
}

}  // namespace

Vec Domain::snap_to_boundary(Vec x) const {
  switch (kind_) {
    case DomainKind::interval:
      return {std::abs(x.x - lo_.x) <= std::abs(x.x - hi_.x) ? lo_.x : hi_.x, 0.0};
    case DomainKind::rectangle: {
      if (signed_distance(x) > 0) return {std::clamp(x.x, lo_.x, hi_.x), std::clamp(x.y, lo_.y, hi_.y)};
      double dx = std::min(x.x - lo_.x, hi_.x - x.x);
      double dy = std::min(x.y - lo_.y, hi_.y - x.y);
      Vec p = x;
      if (dx <= dy + 1e-12) p.x = (x.x - lo_.x <= hi_.x - x.x) ? lo_.x : hi_.x;
      if (dy <= dx + 1e-12) p.y = (x.y - lo_.y <= hi_.y - x.y) ? lo_.y : hi_.y;
      return p;
    }
    case DomainKind::disc: {
      Vec r = x - center_;
      double n = norm(r);
      if (!(n > 0)) throw GeometryError("cannot snap the disc centre");
      return center_ + (radius_ / n) * r;
    }
    case DomainKind::custom: {
      Vec n = normal(x);
      double sd = signed_distance(x);
      Vec dir = sd > 0 ? -n : n;
      double step = std::max(std::abs(sd), 1e-12 * std::max(1.0, diameter()));
      return root_along(*this, x, dir, step, diameter(), "snap");
    }
  }
  return x;
}

Vec project_to_closure(const Domain& dom, Vec x) {
  if (dom.rho(x) <= 0) return x;
  switch (dom.kind()) {
    case DomainKind::interval:
      return {std::clamp(x.x, dom.box_lo().x, dom.box_hi().x), 0.0};
    case DomainKind::rectangle:
      return {std::clamp(x.x, dom.box_lo().x, dom.box_hi().x),
              std::clamp(x.y, dom.box_lo().y, dom.box_hi().y)};
    case DomainKind::disc: {
      Vec p = dom.snap_to_boundary(x);
      // rounding can leave rho at +1e-16; pull in by an ulp-scale factor
      for (int k = 0; k < 8 && dom.rho(p) > 0; ++k) p = dom.center() + (1.0 - 1e-15 * (k + 1)) * (p - dom.center());
      return p;
    }
    case DomainKind::custom: {
      Vec n = dom.normal(x);
      double step = std::max(dom.signed_distance(x), 1e-12 * std::max(1.0, dom.diameter()));
      return root_along(dom, x, -n, step, dom.diameter(), "projection");
    }
  }
  return x;
}

int Grid::node_at(int ix, int iy) const {
  if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return -1;
  return cell_to_node_[static_cast<std::size_t>(iy) * nx_ + ix];
}

int Grid::nearest_node(Vec p) const {
  int ix = static_cast<int>(std::lround((p.x - origin_.x) / h_));
  int iy = dim() == 2 ? static_cast<int>(std::lround((p.y - origin_.y) / h_)) : 0;
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int r = 0; r <= 3 && best < 0; ++r)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        int k = node_at(ix + dx, iy + dy);
        if (k < 0) continue;
        double d = norm2(lattice_[k] - p);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
  if (best >= 0) return best;
  for (std::size_t k = 0; k < size(); ++k) {
    double d = norm2(lattice_[k] - p);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

Grid::Stencil Grid::locate(Vec p) const {
  Stencil s;
  double fx = (p.x - origin_.x) / h_;
  int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 2);
  double tx = std::clamp(fx - ix, 0.0, 1.0);
  double total = 0.0;
  auto add = [&](int node, double w) {
    if (node < 0 || w <= 0.0) return;
    s.node[s.count] = node;
    s.weight[s.count] = w;
    ++s.count;
    total += w;
  };
  if (dim() == 1) {
    add(node_at(ix, 0), 1.0 - tx);
    add(node_at(ix + 1, 0), tx);
  } else {
    double fy = (p.y - origin_.y) / h_;
    int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, ny_ - 2);
    double ty = std::clamp(fy - iy, 0.0, 1.0);
    add(node_at(ix, iy), (1.0 - tx) * (1.0 - ty));
    add(node_at(ix + 1, iy), tx * (1.0 - ty));
    add(node_at(ix, iy + 1), (1.0 - tx) * ty);
    add(node_at(ix + 1, iy + 1), tx * ty);
  }
  if (s.count == 0) {
    s.count = 1;
    s.node[0] = nearest_node(p);
    s.weight[0] = 1.0;
    return s;
  }
  // only renormalise when a corner was missing; keeps exact weights otherwise
  if (total != 1.0)
    for (int k = 0; k < s.count; ++k) s.weight[k] /= total;
  return s;
}

double Grid::interpolate(const std::vector<double>& values, Vec p) const {
  Stencil s = locate(p);
  double v = 0.0;
  for (int k = 0; k < s.count; ++k) v += s.weight[k] * values[s.node[k]];
  return v;
}

std::shared_ptr<const Grid> build_grid(const Domain& dom, double h, double band) {
  if (!(h > 0)) throw GeometryError("grid spacing must be positive");
  if (!(h <= dom.diameter() / 4 * (1.0 + 1e-12))) throw GeometryError("grid spacing must not exceed diameter/4");
  auto g = std::make_shared<Grid>();
  g->domain_ = dom;
  g->h_ = h;
  const bool aligned = dom.kind() == DomainKind::interval || dom.kind() == DomainKind::rectangle;
  std::array<int, 2> n{1, 1};
  Vec origin;
  if (aligned) {
    origin = dom.box_lo();
    for (int a = 0; a < dom.dim(); ++a) {
      double len = dom.box_hi()[a] - dom.box_lo()[a];
      double q = len / h;
      long k = std::lround(q);
      if (std::abs(q - static_cast<double>(k)) > 1e-9 * q)
        throw GeometryError("h must divide the side length " + std::to_string(len));
      n[a] = static_cast<int>(k) + 1;
    }
  } else if (dom.kind() == DomainKind::disc) {
    int k = static_cast<int>(std::ceil(dom.radius() / h)) + 1;
    origin = {dom.center().x - k * h, dom.center().y - k * h};
    n = {2 * k + 1, 2 * k + 1};
  } else {
    origin = dom.box_lo() - Vec{2 * h, dom.dim() == 2 ? 2 * h : 0.0};
    for (int a = 0; a < dom.dim(); ++a)
      n[a] = static_cast<int>(std::ceil((dom.box_hi()[a] - dom.box_lo()[a]) / h)) + 5;
  }
  g->origin_ = origin;
  g->nx_ = n[0];
  g->ny_ = n[1];

  auto coord = [&](int a, int i) {
    if (aligned && i == n[a] - 1) return dom.box_hi()[a];
    return origin[a] + i * h;
  };

  // 0 outside, 1 boundary, 2 interior
  std::vector<std::uint8_t> cls(static_cast<std::size_t>(n[0]) * n[1], 0);
  for (int iy = 0; iy < n[1]; ++iy)
    for (int ix = 0; ix < n[0]; ++ix) {
      Vec p{coord(0, ix), dom.dim() == 2 ? coord(1, iy) : 0.0};
      double sd = dom.signed_distance(p);
      std::uint8_t c = 0;
      if (sd <= -h * (1.0 - 1e-9)) c = 2;
      else if (sd <= band * h * (1.0 + 1e-12)) c = 1;
      cls[static_cast<std::size_t>(iy) * n[0] + ix] = c;
    }
  auto at = [&](int ix, int iy) -> std::uint8_t {
    if (ix < 0 || ix >= n[0] || iy < 0 || iy >= n[1]) return 0;
    return cls[static_cast<std::size_t>(iy) * n[0] + ix];
  };
  // drop boundary nodes that touch no interior node (Moore neighbourhood)
  std::vector<std::uint8_t> keep = cls;
  for (int iy = 0; iy < n[1]; ++iy)
    for (int ix = 0; ix < n[0]; ++ix) {
      if (at(ix, iy) != 1) continue;
      bool touches = false;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if ((dx || dy) && at(ix + dx, iy + dy) == 2) touches = true;
      if (!touches) keep[static_cast<std::size_t>(iy) * n[0] + ix] = 0;
    }

  g->cell_to_node_.assign(keep.size(), -1);
  for (int iy = 0; iy < n[1]; ++iy)
    for (int ix = 0; ix < n[0]; ++ix) {
      std::uint8_t c = keep[static_cast<std::size_t>(iy) * n[0] + ix];
      if (!c) continue;
      Vec p{coord(0, ix), dom.dim() == 2 ? coord(1, iy) : 0.0};
      g->cell_to_node_[static_cast<std::size_t>(iy) * n[0] + ix] = static_cast<int>(g->lattice_.size());
      g->lattice_.push_back(p);
      g->cell_.push_back({ix, iy});
      g->boundary_.push_back(c == 1);
      if (c == 1) {
        Vec s = dom.snap_to_boundary(p);
        g->position_.push_back(s);
        g->normal_.push_back(dom.normal(s));
        g->boundary_list_.push_back(static_cast<int>(g->lattice_.size()) - 1);
      } else {
        g->position_.push_back(p);
        g->normal_.push_back({});
      }
    }
  if (g->boundary_list_.size() == g->lattice_.size())
    throw GeometryError("degenerate domain: no interior node at h=" + std::to_string(h));

  g->nbr_.resize(g->size());
  for (std::size_t k = 0; k < g->size(); ++k) {
    auto [ix, iy] = g->cell_[k];
    g->nbr_[k] = {g->node_at(ix - 1, iy), g->node_at(ix + 1, iy), g->node_at(ix, iy - 1),
                  g->node_at(ix, iy + 1)};
    if (!g->boundary_[k])
      for (int a = 0; a < dom.dim(); ++a)
        if (g->nbr_[k][2 * a] < 0 || g->nbr_[k][2 * a + 1] < 0)
          throw GeometryError("interior node without a full stencil; refine h");
  }
  return g;
}

}  // namespace hjn
