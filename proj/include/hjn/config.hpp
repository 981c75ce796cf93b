#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hjn/boundary.hpp"
#include "hjn/geometry.hpp"
#include "hjn/hamiltonian.hpp"
#include "hjn/scheme.hpp"

namespace hjn {

// INI text: [section] headers, key = value lines, '#' or ';' comments
struct IniValue {
  std::string value;
  int line = 0;
};
using IniSection = std::map<std::string, IniValue>;
using Ini = std::map<std::string, IniSection>;

Ini parse_ini(const std::string& text);

struct ExperimentConfig {
  // geometry
  std::string geometry = "interval";  // interval | rectangle | disc | custom
  std::vector<double> lo{0.0}, hi{1.0}, center{0.0, 0.0};
  double radius = 1.0;
  std::string rho;  // custom
  int dim = 1;
  double h = 0.01;
  // hamiltonian
  std::string hamiltonian = "quadratic";  // quadratic | eikonal | double_well | polynomial
  double a = 1.0, speed = 1.0;
  std::string potential = "0";
  std::vector<double> coeffs;
  // boundary
  std::string boundary = "neumann";  // neumann | affine | max_affine | user
  std::string kind = "cn";           // cn | dbc
  std::string g = "0";
  double normal_coef = 1.0, tangent_coef = 0.0;
  std::string forms;  // "a:b:g; a:b:g"
  std::string form;   // user, variables x y pn pt
  double theta = 1.0, lipschitz = 1.0;
  bool convex = true;
  // run
  std::string command = "evolve";
  double T = 1.0, dt = 0.0, record_every = 0.0, cfl = 0.5;
  std::string flux = "godunov";
  std::string u0 = "0";
  std::vector<double> eps;
  double cauchy_tol = 5e-2;
  int samples = 33, ladder = 8;
  double delta = 0.05;
  std::vector<double> source;  // point for distance
  double aubry_tol = -1.0;     // < 0: default
  double eta = 0.1, shift = -1.0, burn_in = -1.0;
  bool per_node = false;
  std::vector<double> x0{0.5, 0.0};
  std::string vx = "0", vy = "0";
  unsigned seed = 1;
  int sample_budget = 2000;
  std::string out = "out";

  // every resolved key except the output directory, values canonicalised
  std::map<std::string, std::string> canonical() const;
  std::uint64_t hash() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

Domain make_domain(const ExperimentConfig& c);
Hamiltonian make_hamiltonian(const ExperimentConfig& c);
BoundaryModel make_boundary(const ExperimentConfig& c);
ProblemKind problem_kind(const ExperimentConfig& c);
SchemeOptions scheme_options(const ExperimentConfig& c);

std::uint64_t fnv1a(const std::string& s);

}  // namespace hjn
