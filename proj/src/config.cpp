#include "jdpp/config.hpp"

#include <filesystem>
#include <fstream>

#include "jdpp/errors.hpp"
#include "jdpp/generators.hpp"
#include "jdpp/kernel_io.hpp"

namespace jdpp {

using nlohmann::json;

namespace {

SpacePartition parse_space(const json& doc) {
  const int d = doc.at("d").get<int>();
  RealVector sigma = RealVector::Ones(d);
  if (doc.contains("sigma")) {
    const auto s = doc.at("sigma").get<std::vector<double>>();
    require(static_cast<int>(s.size()) == d, Errc::parse_error, "space.sigma length mismatch");
    for (int i = 0; i < d; ++i) sigma(i) = s[static_cast<std::size_t>(i)];
  }
  std::vector<int> part(static_cast<std::size_t>(d), 1);
  if (doc.contains("part")) part = doc.at("part").get<std::vector<int>>();
  return build_space(d, sigma, part);
}

}  // namespace

Kernel generate_named_kernel(const SpacePartition& space, const std::string& name,
                             const json& spec) {
  const json params = spec.value("params", json::object());
  const std::uint64_t seed = spec.value("seed", std::uint64_t{0});
  if (name == "explicit") {
    json doc;
    doc["d"] = space.d;
    doc["sigma"] = std::vector<double>(space.sigma.data(), space.sigma.data() + space.d);
    doc["part"] = space.part;
    doc["coords"] = spec.value("coords", "flat");
    require(spec.contains("matrix"), Errc::parse_error, "explicit kernel needs a matrix");
    doc["matrix"] = spec.at("matrix");
    return kernel_from_json(doc);
  }
  if (name == "random-valid") return random_valid_kernel(space, seed);
  if (name == "projection-rank-r") {
    const int rank = params.value("rank", 1);
    return projection_kernel(space, rank, seed);
  }
  if (name == "discrete-sine") {
    const double a = params.value("a", 0.5);
    return discrete_sine_kernel(space, a);
  }
  fail(Errc::parse_error, "unknown kernel generator: " + name);
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir) {
  try {
    ExperimentConfig cfg;
    cfg.schema_version = doc.value("schema_version", 1);
    require(cfg.schema_version == 1, Errc::parse_error, "unsupported schema_version");

    require(doc.contains("kernel") || doc.contains("space"), Errc::parse_error,
            "config needs a space or a kernel file");

    const json kspec = doc.value("kernel", json::object());
    if (kspec.contains("file")) {
      std::filesystem::path p = kspec.at("file").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      require(std::filesystem::exists(p), Errc::parse_error,
              "kernel file does not exist: " + p.string());
      cfg.kernel = load_kernel_file(p.string());
      cfg.space = cfg.kernel.space;
      if (doc.contains("space")) {
        const SpacePartition declared = parse_space(doc.at("space"));
        require(declared.d == cfg.space.d, Errc::parse_error,
                "config space dimension disagrees with kernel file");
      }
    } else {
      require(doc.contains("space"), Errc::parse_error, "config needs a space");
      cfg.space = parse_space(doc.at("space"));
      const std::string name = kspec.value("generator", "random-valid");
      cfg.kernel = generate_named_kernel(cfg.space, name, kspec);
    }

    if (doc.contains("suites")) cfg.suites = doc.at("suites").get<std::vector<std::string>>();
    if (doc.contains("tolerances")) {
      const json& t = doc.at("tolerances");
      cfg.tol = t.value("validate", t.value("default", kDefaultTol));
    }
    cfg.seed = doc.value("seed", std::uint64_t{1});
    cfg.count = doc.value("count", 1000);
    cfg.pushforward = doc.value("pushforward", false);
    if (doc.contains("output")) {
      const json& o = doc.at("output");
      cfg.out_path = o.value("path", "");
      cfg.format = o.value("format", "json");
      require(cfg.format == "json" || cfg.format == "csv", Errc::parse_error,
              "output.format must be json or csv");
    }
    return cfg;
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io_error, "cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("config parse: ") + e.what());
  }
  return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

}  // namespace jdpp
