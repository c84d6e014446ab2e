#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "jdpp/kernel.hpp"

namespace jdpp {

/// Parsed experiment configuration. A single JSON document drives every
/// command; no environment-variable configuration.
///
///   {"schema_version": 1,
///    "space": {"d": 2, "sigma": [1,1], "part": [1,2]},
///    "kernel": {"generator": "random-valid", "seed": 7} |
///              {"generator": "explicit", "matrix": {...}, "coords": "flat"} |
///              {"file": "kernel.json"},
///    "suites": ["car", ...],          // optional, empty = all
///    "tolerances": {"validate": 1e-9},
///    "seed": 1, "count": 1000, "pushforward": false,
///    "output": {"path": "...", "format": "json"}}
struct ExperimentConfig {
  int schema_version = 1;
  SpacePartition space;
  Kernel kernel;
  std::vector<std::string> suites;
  double tol = kDefaultTol;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 1;
  int count = 1000;
  bool pushforward = false;
};

ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& base_dir);
ExperimentConfig load_config_file(const std::string& path);

/// Generator dispatch: "explicit", "random-valid", "projection-rank-r",
/// "discrete-sine".
Kernel generate_named_kernel(const SpacePartition& space, const std::string& name,
                             const nlohmann::json& spec);

}  // namespace jdpp
