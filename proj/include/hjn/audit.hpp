#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hjn/boundary.hpp"
#include "hjn/geometry.hpp"
#include "hjn/hamiltonian.hpp"

namespace hjn {

struct AuditItem {
  AuditItem() = default;
  AuditItem(std::string i, std::string d) : id(std::move(i)), description(std::move(d)) {}

  std::string id;  // A0 .. A7-
  std::string description;
  bool passed = true;
  bool applicable = true;
  double worst = 0.0;  // worst sampled margin (negative = violated)
  std::string witness;
  int samples = 0;
};

struct AuditReport {
  std::vector<AuditItem> items;
  bool convex_h = false;
  bool convex_b = false;
  const AuditItem& item(const std::string& id) const;
  bool a6() const;  // A6+ or A6-
};

struct AuditOptions {
  int sample_budget = 2000;
  unsigned seed = 1;
  double tol = 1e-9;
  double radius = 4.0;
  // additive eigenvalue for the A6/A7 checks (they are stated for the normalised H)
  double eigenvalue = std::numeric_limits<double>::quiet_NaN();
  double eta = 0.1;
};

AuditReport audit_assumptions(const Hamiltonian& H, const BoundaryModel& B, const Domain& dom,
                              const AuditOptions& opt = {});

}  // namespace hjn
