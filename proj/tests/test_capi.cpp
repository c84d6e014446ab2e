#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "jdpp.h"

using nlohmann::json;

namespace {

struct Str {
  char* p = nullptr;
  ~Str() { jdpp_string_free(p); }
  json parsed() const { return json::parse(std::string(p ? p : "null")); }
};

const char* kWorkedConfig = R"({
  "schema_version": 1,
  "space": {"d": 2, "sigma": [1.0, 1.0], "part": [1, 2]},
  "kernel": {"generator": "explicit", "coords": "flat",
             "matrix": {"re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}}
})";

}  // namespace

TEST_CASE("space and kernel lifecycle through the C API") {
  const double sigma[2] = {1.0, 1.0};
  const int part[2] = {1, 2};
  jdpp_space* space = nullptr;
  REQUIRE(jdpp_space_create(2, sigma, part, &space) == JDPP_OK);
  CHECK(jdpp_space_dim(space) == 2);

  jdpp_kernel* kernel = nullptr;
  REQUIRE(jdpp_kernel_generate(space, "random-valid", R"({"seed": 7})", &kernel) == JDPP_OK);
  CHECK(jdpp_kernel_dim(kernel) == 2);

  Str doc;
  REQUIRE(jdpp_kernel_to_json(kernel, &doc.p) == JDPP_OK);
  jdpp_kernel* back = nullptr;
  REQUIRE(jdpp_kernel_from_json(doc.p, &back) == JDPP_OK);

  Str report;
  int pass = 0;
  REQUIRE(jdpp_kernel_validate(back, 1e-9, &report.p, &pass) == JDPP_OK);
  CHECK(pass == 1);
  CHECK(report.parsed().at("pass").get<bool>());

  jdpp_kernel_free(kernel);
  jdpp_kernel_free(back);
  jdpp_space_free(space);

  // invalid weight
  const double bad_sigma[2] = {1.0, -1.0};
  jdpp_space* bad = nullptr;
  CHECK(jdpp_space_create(2, bad_sigma, part, &bad) == JDPP_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(jdpp_last_error()) > 0);
}

TEST_CASE("bundle, moments and tables for the worked example") {
  jdpp_kernel* kernel = nullptr;
  const char* kdoc = R"({
    "d": 2, "sigma": [1, 1], "part": [1, 2], "coords": "flat",
    "matrix": {"re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}
  })";
  REQUIRE(jdpp_kernel_from_json(kdoc, &kernel) == JDPP_OK);

  jdpp_bundle* bundle = nullptr;
  REQUIRE(jdpp_bundle_assemble(kernel, 1e-9, &bundle) == JDPP_OK);

  Str cert;
  REQUIRE(jdpp_bundle_certificate(bundle, &cert.p) == JDPP_OK);
  CHECK(cert.parsed().at("pass").get<bool>());

  jdpp_kernel* khat = nullptr;
  REQUIRE(jdpp_bundle_khat(bundle, &khat) == JDPP_OK);
  Str khat_doc;
  REQUIRE(jdpp_kernel_to_json(khat, &khat_doc.p) == JDPP_OK);
  CHECK(khat_doc.parsed().at("matrix").at("re").at(0).at(1).get<double>() ==
        doctest::Approx(-0.5));

  const uint64_t deltas[2] = {1, 2};
  Str moment;
  REQUIRE(jdpp_moment_report(bundle, deltas, 2, 1, &moment.p) == JDPP_OK);
  const json row = moment.parsed();
  CHECK(row.at("fock").get<double>() == doctest::Approx(0.5));
  CHECK(row.at("cycle").get<double>() == doctest::Approx(0.5));
  CHECK(row.at("det").get<double>() == doctest::Approx(0.5));
  CHECK(row.at("pairing").get<double>() == doctest::Approx(0.5));
  CHECK(row.at("deltas").get<std::string>() == "{1}|{2}");

  jdpp_table* table = nullptr;
  REQUIRE(jdpp_table_build_j(bundle, &table) == JDPP_OK);
  CHECK(jdpp_table_size(table) == 4);
  CHECK(jdpp_table_prob(table, 0) == doctest::Approx(0.5));
  CHECK(jdpp_table_prob(table, 3) == doctest::Approx(0.5));

  jdpp_table* base = nullptr;
  REQUIRE(jdpp_table_build(kernel, &base) == JDPP_OK);
  jdpp_table* pushed = nullptr;
  REQUIRE(jdpp_table_pushforward(base, &pushed) == JDPP_OK);
  CHECK(jdpp_table_prob(pushed, 0) == doctest::Approx(jdpp_table_prob(table, 0)));

  std::vector<uint64_t> masks(64);
  REQUIRE(jdpp_sample(kernel, 99, 64, masks.data()) == JDPP_OK);
  for (uint64_t m : masks) CHECK((m == 1 || m == 2));

  jdpp_table_free(table);
  jdpp_table_free(base);
  jdpp_table_free(pushed);
  jdpp_kernel_free(khat);
  jdpp_bundle_free(bundle);
  jdpp_kernel_free(kernel);
}

TEST_CASE("error paths surface codes and messages") {
  jdpp_kernel* kernel = nullptr;
  CHECK(jdpp_kernel_from_json("{not json", &kernel) == JDPP_ERR_PARSE);
  CHECK(jdpp_kernel_from_json(R"({"d": 2})", &kernel) == JDPP_ERR_PARSE);

  const char* invalid = R"({
    "d": 1, "part": [1], "coords": "flat", "matrix": {"re": [[1.5]], "im": [[0]]}
  })";
  REQUIRE(jdpp_kernel_from_json(invalid, &kernel) == JDPP_OK);
  int pass = 1;
  REQUIRE(jdpp_kernel_validate(kernel, 1e-9, nullptr, &pass) == JDPP_OK);
  CHECK(pass == 0);
  jdpp_bundle* bundle = nullptr;
  CHECK(jdpp_bundle_assemble(kernel, 1e-9, &bundle) == JDPP_ERR_VALIDATION);
  jdpp_kernel_free(kernel);

  CHECK(jdpp_space_create(2, nullptr, nullptr, nullptr) == JDPP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config commands: validate / moments / sample / dump") {
  Str report;
  int pass = 0;
  REQUIRE(jdpp_cmd_validate(kWorkedConfig, "", &report.p, &pass) == JDPP_OK);
  CHECK(pass == 1);

  const char* tuple = "{1}|{2}";
  Str rows;
  REQUIRE(jdpp_cmd_moments(kWorkedConfig, "", &tuple, 1, "csv", &rows.p) == JDPP_OK);
  const std::string csv(rows.p);
  CHECK(csv.find("n,deltas,fock,cycle,det,pairing,max_disc") == 0);
  const auto line_start = csv.find('\n') + 1;
  const std::string row_text = csv.substr(line_start);
  CHECK(row_text.rfind("2,{1}|{2},", 0) == 0);
  const double fock_cell = std::stod(row_text.substr(std::string("2,{1}|{2},").size()));
  CHECK(fock_cell == doctest::Approx(0.5));

  Str jsonl, summary;
  REQUIRE(jdpp_cmd_sample(kWorkedConfig, "", 1, 31337, 1, 1000, &jsonl.p, &summary.p) == JDPP_OK);
  const json s = summary.parsed();
  CHECK(s.at("count").get<int>() == 1000);
  CHECK(s.at("max_deviation_stderr_units").get<double>() < 5.0);

  Str csvdump;
  REQUIRE(jdpp_dump_operator(kWorkedConfig, "", "{1}", &csvdump.p) == JDPP_OK);
  CHECK(std::string(csvdump.p).find("row,col,re,im") == 0);

  Str names;
  REQUIRE(jdpp_suite_names(&names.p) == JDPP_OK);
  CHECK(std::string(names.p).find("worked-example") != std::string::npos);
}

TEST_CASE("verify through the C API on the cheap suites") {
  Str report;
  int pass = 0;
  REQUIRE(jdpp_cmd_verify(kWorkedConfig, "", "worked-example,pushforward", &report.p, &pass) ==
          JDPP_OK);
  CHECK(pass == 1);
  const json doc = report.parsed();
  CHECK(doc.at("suites").size() == 2);
  for (const auto& suite : doc.at("suites")) CHECK(suite.at("pass").get<bool>());

  // unknown suite name
  Str bad;
  CHECK(jdpp_cmd_verify(kWorkedConfig, "", "no-such-suite", &bad.p, &pass) ==
        JDPP_ERR_INVALID_ARGUMENT);

  // infeasible configured dimension for a Fock-bound suite
  json big;
  big["schema_version"] = 1;
  big["space"] = {{"d", 20}, {"part", std::vector<int>(20, 1)}};
  big["kernel"] = {{"generator", "random-valid"}, {"seed", 1}};
  const std::string big_text = big.dump();
  Str refused;
  CHECK(jdpp_cmd_verify(big_text.c_str(), "", "car", &refused.p, &pass) == JDPP_ERR_INFEASIBLE);
  CHECK(std::string(jdpp_last_error()).find("d <= 5") != std::string::npos);
}
