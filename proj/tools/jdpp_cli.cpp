// Batch driver for the jdpp shared library. Talks to the core exclusively
// through the C API in jdpp.h.
//
// Exit codes: 0 pass, 1 verification/validation failure, 2 usage or config
// error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jdpp.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct CString {
  char* ptr = nullptr;
  ~CString() { jdpp_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

int status_exit_code(jdpp_status s) {
  switch (s) {
    case JDPP_OK:
      return kExitPass;
    case JDPP_ERR_VALIDATION:
      return kExitFail;
    default:
      return kExitUsage;
  }
}

int report_error(jdpp_status s) {
  std::cerr << "error: " << jdpp_last_error() << "\n";
  return status_exit_code(s);
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path);
  if (!in.good()) {
    ok = false;
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  ok = true;
  return buf.str();
}

std::string parent_dir(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

bool write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return true;
  }
  std::ofstream out(out_path);
  if (!out.good()) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return false;
  }
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
  return true;
}

struct CommonArgs {
  std::string config_path;
  std::string out_path;
};

struct LoadedConfig {
  std::string text;
  std::string base_dir;
};

bool load_config(const CommonArgs& args, LoadedConfig& cfg) {
  bool ok = false;
  cfg.text = read_file(args.config_path, ok);
  if (!ok) {
    std::cerr << "error: cannot read config file: " << args.config_path << "\n";
    return false;
  }
  cfg.base_dir = parent_dir(args.config_path);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite determinantal point process / CAR verification toolkit"};
  app.set_version_flag("--version", std::string(jdpp_version()));
  app.require_subcommand(1);

  CommonArgs args;
  std::string format = "json";
  std::string suites;
  std::vector<std::string> deltas;
  std::string dump_operator_path;
  std::string dump_subset;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int count = 0;
  bool count_given = false;

  auto add_common = [&](CLI::App* cmd, bool config_required = true) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")
        ->required(config_required);
    cmd->add_option("--out", args.out_path, "output path (default: stdout)");
  };

  CLI::App* validate = app.add_subcommand("validate", "validate a correlation operator");
  add_common(validate);

  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, false);
  verify->add_option("--suite", suites, "comma-separated suite names (default: all)");

  CLI::App* moments = app.add_subcommand("moments", "tabulate Wick moments by every route");
  add_common(moments);
  moments->add_option("--deltas", deltas, "delta tuple, e.g. \"{1}|{2,3}\" (repeatable)");
  moments->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  moments->add_option("--dump-operator", dump_operator_path,
                      "write the density operator of --dump-subset as sparse CSV");
  moments->add_option("--dump-subset", dump_subset,
                      "subset for --dump-operator (default: first subset of first tuple)");

  CLI::App* sample = app.add_subcommand("sample", "draw exact samples (JSONL) plus a summary");
  add_common(sample);
  sample->add_option("--seed", seed, "sampler seed (overrides config)")
      ->each([&](const std::string&) { seed_given = true; });
  sample->add_option("--count", count, "sample count (overrides config)")
      ->each([&](const std::string&) { count_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  if (validate->parsed()) {
    LoadedConfig cfg;
    if (!load_config(args, cfg)) return kExitUsage;
    CString report;
    int pass = 0;
    const jdpp_status s = jdpp_cmd_validate(cfg.text.c_str(), cfg.base_dir.c_str(), &report.ptr, &pass);
    if (s == JDPP_ERR_VALIDATION) {
      // assembly refused outright; still a verification failure, not usage
      std::cerr << "error: " << jdpp_last_error() << "\n";
      return kExitFail;
    }
    if (s != JDPP_OK) return report_error(s);
    if (!write_output(report.str(), args.out_path)) return kExitUsage;
    return pass ? kExitPass : kExitFail;
  }

  if (verify->parsed()) {
    LoadedConfig cfg;
    if (!args.config_path.empty() && !load_config(args, cfg)) return kExitUsage;
    CString report;
    int pass = 0;
    const jdpp_status s = jdpp_cmd_verify(cfg.text.empty() ? nullptr : cfg.text.c_str(),
                                          cfg.base_dir.c_str(), suites.c_str(), &report.ptr, &pass);
    if (s != JDPP_OK) return report_error(s);
    if (!write_output(report.str(), args.out_path)) return kExitUsage;
    return pass ? kExitPass : kExitFail;
  }

  if (moments->parsed()) {
    LoadedConfig cfg;
    if (!load_config(args, cfg)) return kExitUsage;
    std::vector<const char*> tuple_ptrs;
    tuple_ptrs.reserve(deltas.size());
    for (const auto& t : deltas) tuple_ptrs.push_back(t.c_str());
    CString table;
    const jdpp_status s =
        jdpp_cmd_moments(cfg.text.c_str(), cfg.base_dir.c_str(), tuple_ptrs.data(),
                         static_cast<int>(tuple_ptrs.size()), format.c_str(), &table.ptr);
    if (s != JDPP_OK) return report_error(s);
    if (!write_output(table.str(), args.out_path)) return kExitUsage;

    if (!dump_operator_path.empty()) {
      std::string subset = dump_subset;
      if (subset.empty() && !deltas.empty()) {
        const auto bar = deltas.front().find('|');
        subset = deltas.front().substr(0, bar);
      }
      if (subset.empty()) {
        std::cerr << "error: --dump-operator needs --dump-subset or at least one --deltas\n";
        return kExitUsage;
      }
      CString csv;
      const jdpp_status ds =
          jdpp_dump_operator(cfg.text.c_str(), cfg.base_dir.c_str(), subset.c_str(), &csv.ptr);
      if (ds != JDPP_OK) return report_error(ds);
      std::ofstream out(dump_operator_path);
      if (!out.good()) {
        std::cerr << "error: cannot write " << dump_operator_path << "\n";
        return kExitUsage;
      }
      out << csv.str();
    }
    return kExitPass;
  }

  if (sample->parsed()) {
    LoadedConfig cfg;
    if (!load_config(args, cfg)) return kExitUsage;
    CString jsonl, summary;
    const jdpp_status s =
        jdpp_cmd_sample(cfg.text.c_str(), cfg.base_dir.c_str(), seed_given ? 1 : 0, seed,
                        count_given ? 1 : 0, count, &jsonl.ptr, &summary.ptr);
    if (s != JDPP_OK) return report_error(s);
    if (!args.out_path.empty()) {
      if (!write_output(jsonl.str(), args.out_path)) return kExitUsage;
      std::cout << summary.str() << "\n";
    } else {
      std::cout << jsonl.str();
      std::cerr << summary.str() << "\n";
    }
    return kExitPass;
  }

  return kExitUsage;
}
