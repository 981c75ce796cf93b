#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hjn::acceptance {

struct Result {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;  // measured values
  double seconds = 0.0;
  double budget = 0.0;  // runtime limit in seconds
};

Result run(int id);
// every criterion in order; on_result is called as soon as one finishes
std::vector<Result> run_all(const std::function<void(const Result&)>& on_result = {});

std::string format_line(const Result& r);

}  // namespace hjn::acceptance
