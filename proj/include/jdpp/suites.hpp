#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jdpp/kernel.hpp"

namespace jdpp {

/// One verification suite run. `exercises` is a stable descriptive
/// identifier of the identity the suite checks, so report lines map onto
/// the underlying mathematics.
struct SuiteResult {
  std::string name;
  std::string exercises;
  bool pass = false;
  double max_discrepancy = 0;
  double threshold = 0;
  double runtime_seconds = 0;
  nlohmann::json details;
};

struct SuiteContext {
  /// When present, the suite includes this bundle as an additional test
  /// instance (and refuses with a named cap when it is infeasible).
  std::optional<JKernelBundle> config_bundle;
  std::uint64_t seed_base = 0x1d5eedull;
};

const std::vector<std::string>& suite_names();
bool is_suite_name(const std::string& name);

/// Runs one suite with its pinned sizes, seeds and thresholds. Unknown
/// names and infeasible config bundles throw.
SuiteResult run_suite(const std::string& name, const SuiteContext& ctx);

/// Seeded random instance used by the pinned suites: random weights in
/// [0.5, 2], random two-block partition, random-valid kernel.
JKernelBundle random_bundle(int d, std::uint64_t seed);

/// The fixed covering family of subsets for Delta sweeps: intersection
/// closure of {empty, full, X1, X2, {x_1}, {x_d}, {x_1, x_d}}.
std::vector<std::uint64_t> covering_family(const SpacePartition& space);

/// The rank-one worked example: K = [[1/2,1/2],[1/2,1/2]], part = [1,2].
JKernelBundle worked_example_bundle();

}  // namespace jdpp
