#pragma once

#include <functional>

#include "hjn/boundary.hpp"
#include "hjn/core.hpp"
#include "hjn/hamiltonian.hpp"

namespace hjn {

struct ConjugateOptions {
  double radius = 8.0;
  int samples_1d = 4001;
  int samples_2d = 161;
  double cap = 1e9;  // finite stand-in for +infinity
};

struct SupResult {
  double value = 0.0;
  Vec argmax;
  bool capped = false;
};

// sup_p (xi.p - f(p)) over a p-lattice of the given radius plus golden refinement.
// A maximiser on the lattice edge is re-checked at twice the radius: still on the edge and
// growing -> cap; moved inside -> "radius too small".
SupResult lattice_sup(int dim, const std::function<double(Vec)>& f, Vec xi, const ConjugateOptions& opt = {});

double lagrangian(const Hamiltonian& H, int dim, Vec x, Vec xi, const ConjugateOptions& opt = {});
double boundary_conjugate(const BoundaryModel& B, int dim, Vec x, Vec n, Vec xi,
                          const ConjugateOptions& opt = {});

struct MoreauResult {
  double value = 0.0;
  Vec gradient;
  Vec prox;
};

// min_q B(x,q) + |p-q|^2/(2 delta); exact for piecewise-affine B, zoomed lattice otherwise
MoreauResult moreau(const PointBoundary& B, int dim, Vec p, double delta, double lip);
MoreauResult moreau(const BoundaryModel& B, int dim, Vec x, Vec n, Vec p, double delta);

struct Selection {
  Vec gamma;
  double g = 0.0;
};

// continuous (gamma, g) in the epigraph set of the boundary conjugate, tight at psi(x)
class ObliqueSelection {
 public:
  ObliqueSelection(BoundaryModel B, int dim, double delta = 0.05, std::function<Vec(Vec)> psi = {});

  Selection at(Vec x, Vec n) const;
  // B(x,psi) - (gamma.psi - g) >= 0; small means tight
  double tightness_gap(Vec x, Vec n) const;
  // max over a p-lattice of gamma.p - g - B(x,p); <= 0 means membership
  double membership_violation(Vec x, Vec n, double radius = 4.0, int samples = 81) const;

  const BoundaryModel& model() const { return B_; }
  int dim() const { return dim_; }
  double delta() const { return delta_; }

 private:
  Vec psi(Vec x) const { return psi_ ? psi_(x) : Vec{}; }

  BoundaryModel B_;
  int dim_;
  double delta_;
  std::function<Vec(Vec)> psi_;
};

ObliqueSelection oblique_selection(const BoundaryModel& B, int dim, double delta,
                                   std::function<Vec(Vec)> psi = {});

}  // namespace hjn
