#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hjn/scheme.hpp"

namespace hjn {

struct DiscountStats {
  int newton_iterations = 0;
  int fallback_steps = 0;
  double residual = 0.0;    // ||eps u + F(u)||_inf at exit
  double bound = 0.0;       // max |eps u|
  double bound_limit = 0.0; // M1 = max |F_i(0)|
};

// eps u + F(u) = 0 for the scheme operator (kind cn -> E1 rows, dbc -> E2 boundary rows),
// damped Newton from init; stops when the update is below eps h^2
std::vector<double> discounted_solve(const Scheme& scheme, double eps, const std::vector<double>& init,
                                     DiscountStats* stats = nullptr, int max_iterations = 200);
GridField discounted_solve(const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind, double eps,
                           const GridField& init, const SchemeOptions& opt = {});

struct ErgodicPair {
  double c = 0.0;
  GridField v;
  std::vector<std::pair<double, double>> trace;  // (eps, eps u_eps(x0))
  int anchor = 0;
  double residual = 0.0;         // max_i |F_i(v) - c|
  double lipschitz = 0.0;        // max discrete gradient of u_eps over the schedule
  std::string warning;
  std::vector<DiscountStats> stats;
};

ErgodicPair ergodic_limit(GridPtr grid, const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind,
                          const std::vector<double>& schedule, const SchemeOptions& opt = {},
                          double cauchy_tol = 5e-2);

// -mean_x (u(x,t2) - u(x,t1)) / (t2 - t1)
double large_time_slope(const SpaceTimeField& evo, double t1, double t2);

// H - c always, B - c only for the dynamical boundary problem
std::pair<Hamiltonian, BoundaryModel> normalize(const Hamiltonian& H, const BoundaryModel& B, double c,
                                                ProblemKind kind);

// min over a pseudo-time run of max_i (F_i(u) - level); stays >= c - level > 0 when level < c
double subsolution_defect(GridPtr grid, const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind,
                          double level, double T, const SchemeOptions& opt = {});

std::vector<double> default_eps_schedule();

}  // namespace hjn
