#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jdpp/dpp.hpp"
#include "jdpp/kernel.hpp"
#include "jdpp/moments.hpp"

namespace jdpp {

// Subset text format (external, 1-based): "{1,3}", "{}" for the empty set;
// tuples join subsets with '|', e.g. "{1}|{2}".
std::string format_subset(std::uint64_t mask, int d);
std::string format_deltas(std::span<const std::uint64_t> masks, int d);
std::uint64_t parse_subset(const std::string& text, int d);
std::vector<std::uint64_t> parse_delta_tuple(const std::string& text, int d);

nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const JsaReport& r);
nlohmann::json to_json(const BundleCertificate& c);
nlohmann::json to_json(const GrowthConstant& g);
nlohmann::json to_json(const MomentReport& r, int d);
nlohmann::json to_json(const DppTable& t);

}  // namespace jdpp
