#pragma once

#include <string>

#include <json.hpp>

#include "jdpp/kernel.hpp"

namespace jdpp {

/// Kernel document:
///   {schema_version, d, sigma:[...], part:[...],
///    matrix:{re:[[...]], im:[[...]]}, coords:"flat"|"pointwise"}
/// Serialization always emits flat coordinates.
nlohmann::json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const nlohmann::json& doc);

Kernel load_kernel_file(const std::string& path);
void save_kernel_file(const Kernel& k, const std::string& path);

}  // namespace jdpp
