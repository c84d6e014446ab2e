// End-to-end checks of the installed CLI binary. The harness passes the
// executable path through the JDPP_CLI environment variable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("JDPP_CLI");
  REQUIRE_MESSAGE(p != nullptr, "JDPP_CLI must point at the CLI binary");
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "jdpp_cli_tests";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;

  const std::string cmd =
      cli_path() + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(raw);
  std::ostringstream so, se;
  so << std::ifstream(out).rdbuf();
  se << std::ifstream(err).rdbuf();
  r.out = so.str();
  r.err = se.str();
  return r;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "jdpp_cli_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

const char* kWorkedConfig = R"({
  "schema_version": 1,
  "space": {"d": 2, "sigma": [1.0, 1.0], "part": [1, 2]},
  "kernel": {"generator": "explicit", "coords": "flat",
             "matrix": {"re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}}
})";

}  // namespace

TEST_CASE("validate: pass, fail, and usage errors carry the exit contract") {
  const auto good = write_file("worked.json", kWorkedConfig);
  const RunResult ok = run("validate --config " + good.string());
  CHECK(ok.exit_code == 0);
  CHECK(json::parse(ok.out).at("pass").get<bool>());

  const auto bad = write_file("bad_eig.json", R"({
    "space": {"d": 2, "part": [1, 2]},
    "kernel": {"generator": "explicit",
               "matrix": {"re": [[1.5, 0], [0, 0.2]], "im": [[0,0],[0,0]]}}
  })");
  const RunResult fail = run("validate --config " + bad.string());
  CHECK(fail.exit_code == 1);
  CHECK(fail.out.find("max_eigenvalue") != std::string::npos);
  CHECK(json::parse(fail.out).at("validation").at("max_eigenvalue").get<double>() ==
        doctest::Approx(1.5));

  const auto missing = write_file("missing_file.json", R"({
    "space": {"d": 2, "part": [1, 2]},
    "kernel": {"file": "does_not_exist.json"}
  })");
  CHECK(run("validate --config " + missing.string()).exit_code == 2);
  CHECK(run("validate --config /nonexistent/config.json").exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);
}

TEST_CASE("moments: worked-example row, empty tuple list, cap refusal") {
  const auto cfg = write_file("worked.json", kWorkedConfig);
  const RunResult r = run("moments --config " + cfg.string() + " --deltas \"{1}|{2}\"");
  CHECK(r.exit_code == 0);
  const json rows = json::parse(r.out).at("rows");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("n").get<int>() == 2);
  CHECK(rows[0].at("fock").get<double>() == doctest::Approx(0.5));
  CHECK(rows[0].at("cycle").get<double>() == doctest::Approx(0.5));
  CHECK(rows[0].at("det").get<double>() == doctest::Approx(0.5));
  CHECK(rows[0].at("pairing").get<double>() == doctest::Approx(0.5));
  CHECK(rows[0].at("max_disc").get<double>() < 1e-10);

  const RunResult empty = run("moments --config " + cfg.string());
  CHECK(empty.exit_code == 0);
  CHECK(json::parse(empty.out).at("rows").empty());

  // CSV schema line
  const RunResult csv =
      run("moments --config " + cfg.string() + " --deltas \"{1}|{2}\" --format csv");
  CHECK(csv.out.rfind("n,deltas,fock,cycle,det,pairing,max_disc", 0) == 0);

  // more subsets than the cycle-route cap
  std::string many = "\"";
  for (int i = 0; i < 9; ++i) many += (i ? "|{1}" : "{1}");
  many += "\"";
  const RunResult refused = run("moments --config " + cfg.string() + " --deltas " + many);
  CHECK(refused.exit_code == 2);
  CHECK(refused.err.find("n <= 8") != std::string::npos);
}

TEST_CASE("moments: operator dump is sparse CSV over occupation bitstrings") {
  const auto cfg = write_file("worked.json", kWorkedConfig);
  const fs::path dump = fs::temp_directory_path() / "jdpp_cli_tests" / "rho.csv";
  const RunResult r = run("moments --config " + cfg.string() +
                          " --deltas \"{1}|{2}\" --dump-operator " + dump.string());
  CHECK(r.exit_code == 0);
  std::ostringstream buf;
  buf << std::ifstream(dump).rdbuf();
  const std::string text = buf.str();
  CHECK(text.rfind("row,col,re,im", 0) == 0);
  CHECK(text.find("0000") != std::string::npos);
}

TEST_CASE("sample: degenerate kernel, byte-identical reruns, marginals") {
  const auto zero = write_file("zero.json", R"({
    "space": {"d": 2, "part": [1, 2]},
    "kernel": {"generator": "explicit",
               "matrix": {"re": [[0, 0], [0, 0]], "im": [[0,0],[0,0]]}},
    "count": 10, "seed": 5
  })");
  const fs::path out1 = fs::temp_directory_path() / "jdpp_cli_tests" / "s1.jsonl";
  const RunResult r1 = run("sample --config " + zero.string() + " --out " + out1.string());
  CHECK(r1.exit_code == 0);
  std::ostringstream buf1;
  buf1 << std::ifstream(out1).rdbuf();
  CHECK(buf1.str() == "0\n0\n0\n0\n0\n0\n0\n0\n0\n0\n");

  const auto cfg = write_file("worked.json", kWorkedConfig);
  const fs::path outa = fs::temp_directory_path() / "jdpp_cli_tests" / "sa.jsonl";
  const fs::path outb = fs::temp_directory_path() / "jdpp_cli_tests" / "sb.jsonl";
  const RunResult ra = run("sample --config " + cfg.string() + " --seed 42 --count 100000 --out " +
                           outa.string());
  const RunResult rb = run("sample --config " + cfg.string() + " --seed 42 --count 100000 --out " +
                           outb.string());
  CHECK(ra.exit_code == 0);
  CHECK(rb.exit_code == 0);
  std::ostringstream ba, bb;
  ba << std::ifstream(outa).rdbuf();
  bb << std::ifstream(outb).rdbuf();
  CHECK(ba.str() == bb.str());

  const json summary = json::parse(ra.out);
  const double emp = summary.at("marginals").at(0).at("empirical").get<double>();
  CHECK(std::abs(emp - 0.5) < 4 * std::sqrt(0.25 / 100000.0));
}

TEST_CASE("identical configs produce identical reports minus timing") {
  const auto cfg = write_file("worked.json", kWorkedConfig);
  const RunResult a = run("validate --config " + cfg.string());
  const RunResult b = run("validate --config " + cfg.string());
  CHECK(a.out == b.out);  // validate reports carry no timing fields

  auto strip_runtimes = [](const std::string& text) {
    json doc = json::parse(text);
    for (auto& suite : doc.at("suites")) suite.erase("runtime_seconds");
    return doc.dump();
  };
  const RunResult v1 = run("verify --config " + cfg.string() + " --suite worked-example");
  const RunResult v2 = run("verify --config " + cfg.string() + " --suite worked-example");
  CHECK(strip_runtimes(v1.out) == strip_runtimes(v2.out));
}

TEST_CASE("verify: worked-example config passes and reports the 0.5 anchor") {
  const auto cfg = write_file("worked.json", kWorkedConfig);
  const RunResult r =
      run("verify --config " + cfg.string() + " --suite worked-example,moment-identity");
  CHECK(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("pass").get<bool>());

  const RunResult routes = run("verify --config " + cfg.string() + " --suite moment-routes");
  CHECK(routes.exit_code == 0);
  CHECK(routes.out.find("0.5") != std::string::npos);

  const auto big = write_file("big.json", R"({
    "space": {"d": 20, "part": [1,1,1,1,1,1,1,1,1,1,2,2,2,2,2,2,2,2,2,2]},
    "kernel": {"generator": "random-valid", "seed": 1}
  })");
  const RunResult refused = run("verify --config " + big.string() + " --suite car");
  CHECK(refused.exit_code == 2);
  CHECK(refused.err.find("d <= 5") != std::string::npos);
}
