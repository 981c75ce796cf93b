#pragma once

#include <functional>
#include <vector>

#include "hjn/boundary.hpp"
#include "hjn/core.hpp"
#include "hjn/geometry.hpp"
#include "hjn/hamiltonian.hpp"

namespace hjn {

enum class ProblemKind { cn, dbc };
enum class Flux { godunov, lax_friedrichs };

struct GridField {
  GridPtr grid;
  std::vector<double> values;
};

struct SpaceTimeField {
  GridPtr grid;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  double dt = 0.0;

  // index of the stamp equal to t (within 1e-9 relative), -1 if absent
  int stamp(double t) const;
};

// Lax-Friedrichs numerical Hamiltonian
double interior_numerical_hamiltonian(const Hamiltonian& H, Vec x, Vec p_minus, Vec p_plus, Vec sigma, int dim);
// Godunov numerical Hamiltonian of phi(|p|): ext_{p_x} ext_{p_y}, min on increasing and max on decreasing axes
double godunov_hamiltonian(const RadialProfile& phi, Vec p_minus, Vec p_plus, int dim);
// lambda with B(t + lambda n) = 0 (unique by obliqueness); tol bounds |B| at the root
double boundary_ghost_solve(const PointBoundary& B, Vec n, Vec tangential_grad, double lambda_bracket, double tol);

struct SchemeOptions {
  Flux flux = Flux::godunov;
  double cfl = 0.5;
  Exec exec = Exec::parallel;
};

// Spatial operator of the explicit monotone scheme: u_t + F(u) = 0 at every node.
// F is the numerical Hamiltonian at interior and (CN) boundary nodes (ghost gradient from B = 0)
// and B(x, D_h u) at (DBC) boundary nodes.
class Scheme {
 public:
  Scheme(GridPtr grid, Hamiltonian H, BoundaryModel B, ProblemKind kind, SchemeOptions opt = {});

  double node(std::size_t i, const std::vector<double>& u) const;
  // 1-D only: a generalized derivative dF_i/du_j (the branch the flux selected), <= 3 entries
  int node_jacobian_1d(std::size_t i, const std::vector<double>& u, int* cols, double* vals) const;
  void apply(const std::vector<double>& u, std::vector<double>& out) const;
  std::vector<double> apply(const std::vector<double>& u) const;
  // u - dt F(u); throws CflViolation when dt exceeds h / (dim sigma)
  std::vector<double> step(const std::vector<double>& u, double dt) const;

  double sigma() const { return sigma_; }
  double admissible_dt() const;
  double dt() const { return opt_.cfl * admissible_dt(); }
  // max one-sided difference quotient of u
  double gradient_bound(const std::vector<double>& u) const;
  // raises sigma when gradients exceed the radius it was estimated for; true if changed
  bool ensure_gradient_bound(double G);

  const Grid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  const Hamiltonian& hamiltonian() const { return H_; }
  const BoundaryModel& boundary() const { return B_; }
  ProblemKind kind() const { return kind_; }
  const SchemeOptions& options() const { return opt_; }
  std::size_t size() const { return grid_->size(); }
  double potential(std::size_t i) const { return V_[i]; }

 private:
  double numerical_h(std::size_t i, Vec pm, Vec pp) const;
  void estimate_sigma(double G);

  GridPtr grid_;
  Hamiltonian H_;
  BoundaryModel B_;
  ProblemKind kind_;
  SchemeOptions opt_;
  std::vector<double> V_;
  std::vector<PointBoundary> pb_;  // per node, empty for interior
  double sigma_ = 1.0;
  double radius_ = 0.0;
};

GridField step_cn(const GridField& u, const Hamiltonian& H, const BoundaryModel& B, double dt,
                  const SchemeOptions& opt = {});
GridField step_dbc(const GridField& u, const Hamiltonian& H, const BoundaryModel& B, double dt,
                   const SchemeOptions& opt = {});

struct EvolveOptions {
  SchemeOptions scheme;
  double dt = 0.0;  // 0: cfl * admissible
  // called after every step with (t, u)
  std::function<void(double, const std::vector<double>&)> on_step;
};

SpaceTimeField evolve(const GridField& u0, const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind,
                      double T, double record_every, const EvolveOptions& opt = {});

GridField sample_field(GridPtr grid, const std::function<double(Vec)>& f);

}  // namespace hjn
