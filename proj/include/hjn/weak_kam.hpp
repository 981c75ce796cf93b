#pragma once

#include <limits>
#include <vector>

#include "hjn/boundary.hpp"
#include "hjn/scheme.hpp"

namespace hjn {

// Travel cost per unit length for a radial Lagrangian: m(x) = inf_s L(x,s)/s.
// Moves run between Moore neighbours with the endpoint-averaged cost.
class ActionMetric {
 public:
  // models must already be normalised to c = 0; throws NumericalError on negative-cost loops
  ActionMetric(GridPtr grid, const Hamiltonian& H, const BoundaryModel& B);

  const Grid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  double rate(std::size_t i) const { return m_[i]; }
  double v_max() const { return v_max_; }

  struct Edge {
    int to;
    double length;
  };
  const std::vector<Edge>& edges(std::size_t i) const { return adj_[i]; }
  double edge_cost(std::size_t i, const Edge& e) const { return 0.5 * e.length * (m_[i] + m_[e.to]); }
  const std::vector<std::vector<int>>& sweep_orders() const { return orders_; }

 private:
  GridPtr grid_;
  std::vector<double> m_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<std::vector<int>> orders_;
  double v_max_ = 1.0;
};

// d(., y) by Gauss-Seidel sweeping with d(y) = 0 pinned
std::vector<double> distance_from(const ActionMetric& metric, int y);

struct ActionMatrix {
  GridPtr grid;
  std::vector<int> sources;
  std::vector<std::vector<double>> d;  // d[k][x] = d(x, sources[k])
  std::vector<double> rate;
  double v_max = 1.0;

  // column of source node y, nullptr if y is not a source
  const std::vector<double>* column(int y) const;
};

// sources empty: every node (refused above 2000 nodes)
ActionMatrix action_matrix(const ActionMetric& metric, std::vector<int> sources = {}, Exec exec = Exec::parallel);

struct AubryMask {
  std::vector<char> mask;
  std::vector<double> residual;  // per unit length; NaN for nodes that are not sources
  double tol = 0.0;
  bool forced = false;  // nothing passed; the smallest residual was kept
};

// default tol: 5 (h + h / V_max)
AubryMask aubry_set(const ActionMatrix& action, double tol = std::numeric_limits<double>::quiet_NaN());

// u_inf(x) = min_{y in mask} d(x,y) + min_z (d(y,z) + u0(z)); needs the full matrix
GridField asymptotic_profile(const GridField& u0, const ActionMatrix& action, const AubryMask& mask);

struct MonotonicityTrace {
  std::vector<double> s;
  std::vector<double> mu_plus, mu_minus;
  double eta = 0.0;
  double shift = 0.0;
  double C = 0.0;  // max (u - v + shift)
  std::vector<std::vector<double>> node_mu_plus, node_mu_minus;  // per_node only
};

// shift < 0: the smallest shift with min (u - v + shift) = 1
MonotonicityTrace monotonicity_trace(const SpaceTimeField& evo, const GridField& v, double eta, double shift = -1.0,
                                     bool per_node = false);

}  // namespace hjn
