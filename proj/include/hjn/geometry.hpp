#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "hjn/core.hpp"
#include "hjn/expr.hpp"

namespace hjn {

enum class DomainKind { interval, rectangle, disc, custom };

// Bounded domain given by a defining function rho (< 0 inside) and its gradient.
class Domain {
 public:
  static Domain interval(double a, double b);
  static Domain rectangle(Vec lo, Vec hi);
  static Domain disc(Vec center, double radius);
  // rho in the variables (x, y); box must contain the closure
  static Domain custom(int dim, Expr rho, Vec box_lo, Vec box_hi);

  int dim() const { return dim_; }
  DomainKind kind() const { return kind_; }
  double rho(Vec x) const;
  Vec grad_rho(Vec x) const;
  Vec normal(Vec x) const;  // grad_rho / |grad_rho|
  // exact signed distance for the built-in shapes, rho/|grad rho| otherwise
  double signed_distance(Vec x) const;
  bool contains(Vec x, double tol = 0.0) const { return rho(x) <= tol; }

  Vec box_lo() const { return lo_; }
  Vec box_hi() const { return hi_; }
  Vec centroid() const;
  double diameter() const;
  Vec center() const { return center_; }
  double radius() const { return radius_; }

  // moves a point in the boundary band onto {rho = 0}
  Vec snap_to_boundary(Vec x) const;

 private:
  int dim_ = 1;
  DomainKind kind_ = DomainKind::interval;
  Vec lo_, hi_, center_;
  double radius_ = 0.0;
  Expr rho_expr_;
};

// closest-point style projection of a point near the domain onto its closure
Vec project_to_closure(const Domain& dom, Vec x);

class Grid;
std::shared_ptr<const Grid> build_grid(const Domain& dom, double h, double band = 0.6);

// Clipped Cartesian lattice. Stencil arithmetic uses lattice coordinates;
// boundary nodes also carry their snapped position and unit normal.
class Grid {
 public:
  int dim() const { return domain_.dim(); }
  double h() const { return h_; }
  std::size_t size() const { return lattice_.size(); }
  const Domain& domain() const { return domain_; }

  Vec lattice(std::size_t i) const { return lattice_[i]; }
  Vec position(std::size_t i) const { return position_[i]; }  // snapped for boundary nodes
  Vec normal(std::size_t i) const { return normal_[i]; }      // zero for interior nodes
  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }
  std::array<int, 2> cell(std::size_t i) const { return cell_[i]; }
  // neighbor along axis (0/1) on side (0 = minus, 1 = plus); -1 when absent
  int neighbor(std::size_t i, int axis, int side) const { return nbr_[i][2 * axis + side]; }
  int node_at(int ix, int iy) const;
  const std::vector<int>& boundary_nodes() const { return boundary_list_; }
  std::size_t interior_count() const { return size() - boundary_list_.size(); }
  int nearest_node(Vec p) const;
  Vec origin() const { return origin_; }
  std::array<int, 2> extent() const { return {nx_, ny_}; }

  // multilinear interpolation weights at p (nodes + weights summing to 1, all >= 0)
  struct Stencil {
    int count = 0;
    std::array<int, 4> node{};
    std::array<double, 4> weight{};
  };
  Stencil locate(Vec p) const;
  double interpolate(const std::vector<double>& values, Vec p) const;

  friend std::shared_ptr<const Grid> build_grid(const Domain& dom, double h, double band);

 private:
  Domain domain_;
  double h_ = 0.0;
  int nx_ = 0, ny_ = 1;
  Vec origin_;
  std::vector<Vec> lattice_, position_, normal_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::array<int, 2>> cell_;
  std::vector<std::array<int, 4>> nbr_;
  std::vector<int> cell_to_node_;
  std::vector<int> boundary_list_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace hjn
