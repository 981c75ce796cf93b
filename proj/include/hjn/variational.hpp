#pragma once

#include <vector>

#include "hjn/conjugate.hpp"
#include "hjn/scheme.hpp"
#include "hjn/skorokhod.hpp"

namespace hjn {

struct ControlSet {
  std::vector<Vec> velocities;  // contains w = 0
  std::vector<double> ladder;   // reflection intensities, ladder[0] = 0
  double v_max = 0.0;
};

// velocity lattice (1-D: samples on [-V,V]; 2-D: polar) and theta-scaled geometric ladder
ControlSet make_control_set(const Grid& grid, const Hamiltonian& H, const BoundaryModel& B, int samples = 33,
                            int ladder = 8);

struct ValueTable {
  GridPtr grid;
  ProblemKind kind = ProblemKind::cn;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  int stamp(double t) const;
};

struct ValueOptions {
  int samples = 33;
  int ladder = 8;
  double dt = 0.0;            // 0: 2h / V_max
  double record_every = 0.0;  // stamps that must be hit exactly (crosscheck alignment)
  double delta = 0.05;        // Moreau parameter of the reflection selection
  Exec exec = Exec::parallel;
};

// one dynamic-programming step of the (CN) value: minimise over (w, l) at every node
std::vector<double> dp_step_cn(const Grid& grid, const std::vector<double>& prev, const Hamiltonian& H,
                               const ObliqueSelection& sel, const ControlSet& controls, double dt,
                               Exec exec = Exec::parallel);
// one step of the (DBC) value; a step with intensity l consumes clock time dt (1 + l), read from the stack
std::vector<double> dp_step_dbc(const ValueTable& table, const Hamiltonian& H, const ObliqueSelection& sel,
                                const ControlSet& controls, Exec exec = Exec::parallel);

ValueTable value(const GridField& u0, const Hamiltonian& H, const BoundaryModel& B, ProblemKind kind, double T,
                 const ValueOptions& opt = {});

struct CrosscheckReport {
  std::vector<double> times;
  std::vector<double> errors;
  double max_error = 0.0;
  double final_error = 0.0;
};

CrosscheckReport crosscheck(const ValueTable& table, const SpaceTimeField& evo);

}  // namespace hjn
