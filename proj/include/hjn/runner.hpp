#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hjn/config.hpp"

namespace hjn {

struct RunOptions {
  std::string out;  // overrides [run] out when non-empty
  int threads = 0;
  bool verbose = false;
  std::ostream* log = nullptr;
};

struct RunManifest {
  std::string command;
  std::string config_hash;  // 16 hex digits
  std::string version = kVersion;
  double wall_clock = 0.0;
  std::vector<std::pair<std::string, double>> stages;  // seconds per stage
  std::vector<std::string> files;                      // relative to the output directory
  std::vector<std::pair<std::string, std::string>> results;
  bool acceptance_failed = false;

  std::string to_json() const;
};

// runs the configured subcommand and writes its outputs plus manifest.json
RunManifest run(const ExperimentConfig& cfg, const RunOptions& opt = {});

// 2 config/geometry error, 3 numerical failure, 1 anything else
int exit_code(const std::exception& e);

}  // namespace hjn
