#include "jdpp.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "jdpp/config.hpp"
#include "jdpp/dpp.hpp"
#include "jdpp/errors.hpp"
#include "jdpp/fields.hpp"
#include "jdpp/kernel_io.hpp"
#include "jdpp/moments.hpp"
#include "jdpp/report.hpp"
#include "jdpp/suites.hpp"

using nlohmann::json;

struct jdpp_space {
  jdpp::SpacePartition v;
};
struct jdpp_kernel {
  jdpp::Kernel v;
};
struct jdpp_bundle {
  jdpp::JKernelBundle v;
};
struct jdpp_table {
  jdpp::DppTable v;
};

namespace {

thread_local std::string g_last_error;

jdpp_status map_code(jdpp::Errc c) {
  switch (c) {
    case jdpp::Errc::invalid_argument:
      return JDPP_ERR_INVALID_ARGUMENT;
    case jdpp::Errc::dimension_mismatch:
      return JDPP_ERR_DIMENSION;
    case jdpp::Errc::validation_failure:
      return JDPP_ERR_VALIDATION;
    case jdpp::Errc::infeasible_size:
      return JDPP_ERR_INFEASIBLE;
    case jdpp::Errc::parse_error:
      return JDPP_ERR_PARSE;
    case jdpp::Errc::io_error:
      return JDPP_ERR_IO;
  }
  return JDPP_ERR_INTERNAL;
}

template <typename Fn>
jdpp_status guarded(Fn&& fn) {
  try {
    fn();
    return JDPP_OK;
  } catch (const jdpp::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return JDPP_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require_arg(bool ok, const char* what) {
  jdpp::require(ok, jdpp::Errc::invalid_argument, what);
}

json verify_report(const jdpp::ExperimentConfig* cfg, const std::string& suites_csv) {
  jdpp::SuiteContext ctx;
  if (cfg != nullptr) ctx.config_bundle = jdpp::assemble_j_kernel(cfg->kernel, cfg->tol);

  std::vector<std::string> selected;
  if (!suites_csv.empty()) {
    std::stringstream in(suites_csv);
    std::string name;
    while (std::getline(in, name, ',')) {
      if (name.empty()) continue;
      jdpp::require(jdpp::is_suite_name(name), jdpp::Errc::invalid_argument,
                    "unknown suite: " + name);
      selected.push_back(name);
    }
  } else if (cfg != nullptr && !cfg->suites.empty()) {
    for (const auto& name : cfg->suites) {
      jdpp::require(jdpp::is_suite_name(name), jdpp::Errc::invalid_argument,
                    "unknown suite: " + name);
      selected.push_back(name);
    }
  }
  if (selected.empty()) selected = jdpp::suite_names();

  json suites = json::array();
  bool all_pass = true;
  for (const auto& name : selected) {
    const jdpp::SuiteResult res = jdpp::run_suite(name, ctx);
    all_pass = all_pass && res.pass;
    suites.push_back(json{{"name", res.name},
                          {"exercises", res.exercises},
                          {"pass", res.pass},
                          {"max_discrepancy", res.max_discrepancy},
                          {"threshold", res.threshold},
                          {"runtime_seconds", res.runtime_seconds},
                          {"details", res.details}});
  }
  return json{{"schema_version", 1}, {"command", "verify"}, {"suites", suites}, {"pass", all_pass}};
}

json moment_row(jdpp::WickEngine& engine, const std::vector<std::uint64_t>& deltas) {
  const int n = static_cast<int>(deltas.size());
  const int d = engine.bundle().d();
  jdpp::require(n <= jdpp::kMaxCycleMomentOrder, jdpp::Errc::infeasible_size,
                "moments capped at n <= " + std::to_string(jdpp::kMaxCycleMomentOrder) +
                    " (cycle route)");
  const bool fock_ok = n <= jdpp::kMaxFockMomentOrder;
  const bool pairing_ok = n <= jdpp::kMaxPairingOrder && d <= jdpp::kMaxPairingSites;
  if (fock_ok) return to_json(jdpp::moment_report(engine, deltas, pairing_ok), d);

  json row{{"n", n},
           {"deltas", jdpp::format_deltas(deltas, d)},
           {"fock", nullptr},
           {"cycle", jdpp::cycle_trace_moment(engine.bundle(), deltas)},
           {"pairing", nullptr}};
  if (n <= jdpp::kMaxDeterminantMomentOrder) {
    row["det"] = jdpp::determinant_moment_sum(engine.bundle(), deltas);
    row["max_disc"] = std::abs(row["det"].get<double>() - row["cycle"].get<double>());
  } else {
    row["det"] = nullptr;
    row["max_disc"] = nullptr;
  }
  return row;
}

std::string rows_to_csv(const json& rows) {
  std::ostringstream out;
  out << "n,deltas,fock,cycle,det,pairing,max_disc\n";
  auto cell = [](const json& v) -> std::string {
    if (v.is_null()) return "";
    std::ostringstream o;
    o.precision(17);
    o << v.get<double>();
    return o.str();
  };
  for (const auto& row : rows) {
    out << row.at("n").get<std::size_t>() << ',' << row.at("deltas").get<std::string>() << ','
        << cell(row.at("fock")) << ',' << cell(row.at("cycle")) << ',' << cell(row.at("det"))
        << ',' << cell(row.at("pairing")) << ',' << cell(row.at("max_disc")) << '\n';
  }
  return out.str();
}

std::string bitstring(std::uint64_t state, int modes) {
  std::string s(static_cast<std::size_t>(modes), '0');
  for (int k = 0; k < modes; ++k)
    if ((state >> k) & 1ull) s[static_cast<std::size_t>(k)] = '1';
  return s;
}

}  // namespace

extern "C" {

const char* jdpp_version(void) { return "0.1.0"; }

const char* jdpp_last_error(void) { return g_last_error.c_str(); }

void jdpp_string_free(char* s) { std::free(s); }

jdpp_status jdpp_space_create(int d, const double* sigma, const int* part, jdpp_space** out) {
  return guarded([&] {
    require_arg(out != nullptr && sigma != nullptr && part != nullptr, "null argument");
    jdpp::RealVector s(d);
    std::vector<int> p(static_cast<std::size_t>(std::max(d, 0)));
    for (int i = 0; i < d; ++i) {
      s(i) = sigma[i];
      p[static_cast<std::size_t>(i)] = part[i];
    }
    *out = new jdpp_space{jdpp::build_space(d, s, p)};
  });
}

void jdpp_space_free(jdpp_space* s) { delete s; }

int jdpp_space_dim(const jdpp_space* s) { return s == nullptr ? 0 : s->v.d; }

jdpp_status jdpp_kernel_from_json(const char* doc, jdpp_kernel** out) {
  return guarded([&] {
    require_arg(doc != nullptr && out != nullptr, "null argument");
    json parsed;
    try {
      parsed = json::parse(doc);
    } catch (const json::exception& e) {
      jdpp::fail(jdpp::Errc::parse_error, e.what());
    }
    *out = new jdpp_kernel{jdpp::kernel_from_json(parsed)};
  });
}

jdpp_status jdpp_kernel_to_json(const jdpp_kernel* k, char** out) {
  return guarded([&] {
    require_arg(k != nullptr && out != nullptr, "null argument");
    *out = dup_string(jdpp::kernel_to_json(k->v).dump(2));
  });
}

jdpp_status jdpp_kernel_generate(const jdpp_space* s, const char* name, const char* spec_json,
                                 jdpp_kernel** out) {
  return guarded([&] {
    require_arg(s != nullptr && name != nullptr && out != nullptr, "null argument");
    json spec = json::object();
    if (spec_json != nullptr && *spec_json != '\0') {
      try {
        spec = json::parse(spec_json);
      } catch (const json::exception& e) {
        jdpp::fail(jdpp::Errc::parse_error, e.what());
      }
    }
    *out = new jdpp_kernel{jdpp::generate_named_kernel(s->v, name, spec)};
  });
}

void jdpp_kernel_free(jdpp_kernel* k) { delete k; }

int jdpp_kernel_dim(const jdpp_kernel* k) { return k == nullptr ? 0 : k->v.d(); }

jdpp_status jdpp_kernel_validate(const jdpp_kernel* k, double tol, char** report_json, int* pass) {
  return guarded([&] {
    require_arg(k != nullptr, "null argument");
    const jdpp::ValidationReport r = jdpp::validate_correlation_operator(k->v, tol);
    if (report_json != nullptr) *report_json = dup_string(to_json(r).dump(2));
    if (pass != nullptr) *pass = r.pass ? 1 : 0;
  });
}

jdpp_status jdpp_bundle_assemble(const jdpp_kernel* k, double tol, jdpp_bundle** out) {
  return guarded([&] {
    require_arg(k != nullptr && out != nullptr, "null argument");
    *out = new jdpp_bundle{jdpp::assemble_j_kernel(k->v, tol)};
  });
}

void jdpp_bundle_free(jdpp_bundle* b) { delete b; }

jdpp_status jdpp_bundle_certificate(const jdpp_bundle* b, char** report_json) {
  return guarded([&] {
    require_arg(b != nullptr && report_json != nullptr, "null argument");
    *report_json = dup_string(to_json(b->v.cert).dump(2));
  });
}

jdpp_status jdpp_bundle_khat(const jdpp_bundle* b, jdpp_kernel** out) {
  return guarded([&] {
    require_arg(b != nullptr && out != nullptr, "null argument");
    *out = new jdpp_kernel{b->v.Khat};
  });
}

jdpp_status jdpp_moment_report(const jdpp_bundle* b, const uint64_t* deltas, int n,
                               int want_pairing, char** report_json) {
  return guarded([&] {
    require_arg(b != nullptr && deltas != nullptr && report_json != nullptr && n >= 1,
                "null argument or empty tuple");
    const jdpp::FockSpace fs(b->v.d());
    jdpp::WickEngine engine(b->v, fs);
    const std::vector<std::uint64_t> ds(deltas, deltas + n);
    const jdpp::MomentReport r = jdpp::moment_report(engine, ds, want_pairing != 0);
    *report_json = dup_string(to_json(r, b->v.d()).dump(2));
  });
}

jdpp_status jdpp_table_build(const jdpp_kernel* k, jdpp_table** out) {
  return guarded([&] {
    require_arg(k != nullptr && out != nullptr, "null argument");
    *out = new jdpp_table{jdpp::dpp_distribution(k->v)};
  });
}

jdpp_status jdpp_table_build_j(const jdpp_bundle* b, jdpp_table** out) {
  return guarded([&] {
    require_arg(b != nullptr && out != nullptr, "null argument");
    *out = new jdpp_table{jdpp::j_dpp_distribution(b->v)};
  });
}

jdpp_status jdpp_table_pushforward(const jdpp_table* t, jdpp_table** out) {
  return guarded([&] {
    require_arg(t != nullptr && out != nullptr, "null argument");
    *out = new jdpp_table{jdpp::particle_hole_pushforward(t->v)};
  });
}

void jdpp_table_free(jdpp_table* t) { delete t; }

int64_t jdpp_table_size(const jdpp_table* t) {
  return t == nullptr ? 0 : static_cast<int64_t>(t->v.probs.size());
}

double jdpp_table_prob(const jdpp_table* t, uint64_t mask) {
  if (t == nullptr || mask >= t->v.probs.size()) return 0.0;
  return t->v.prob(mask);
}

jdpp_status jdpp_table_to_json(const jdpp_table* t, char** out) {
  return guarded([&] {
    require_arg(t != nullptr && out != nullptr, "null argument");
    *out = dup_string(to_json(t->v).dump(2));
  });
}

jdpp_status jdpp_sample(const jdpp_kernel* k, uint64_t seed, int count, uint64_t* out_masks) {
  return guarded([&] {
    require_arg(k != nullptr && out_masks != nullptr, "null argument");
    const auto samples = jdpp::hkpv_sample(k->v, seed, count);
    std::copy(samples.begin(), samples.end(), out_masks);
  });
}

jdpp_status jdpp_cmd_validate(const char* config_json, const char* base_dir, char** report_json,
                              int* pass) {
  return guarded([&] {
    require_arg(config_json != nullptr, "null config");
    const jdpp::ExperimentConfig cfg =
        jdpp::parse_config(json::parse(config_json, nullptr, true), base_dir ? base_dir : "");

    const jdpp::ValidationReport vr = jdpp::validate_correlation_operator(cfg.kernel, cfg.tol);
    json report{{"schema_version", 1}, {"command", "validate"}, {"validation", to_json(vr)}};
    bool ok = vr.pass;
    if (vr.pass) {
      const jdpp::JKernelBundle bundle = jdpp::assemble_j_kernel(cfg.kernel, cfg.tol);
      report["bundle_certificate"] = to_json(bundle.cert);
      report["j_self_adjoint_khat"] = to_json(jdpp::check_j_self_adjoint(bundle.Khat, cfg.tol));
      ok = ok && bundle.cert.pass;
    }
    report["pass"] = ok;
    if (report_json != nullptr) *report_json = dup_string(report.dump(2));
    if (pass != nullptr) *pass = ok ? 1 : 0;
  });
}

jdpp_status jdpp_cmd_verify(const char* config_json, const char* base_dir, const char* suites_csv,
                            char** report_json, int* pass) {
  return guarded([&] {
    std::optional<jdpp::ExperimentConfig> cfg;
    if (config_json != nullptr && *config_json != '\0')
      cfg = jdpp::parse_config(json::parse(config_json, nullptr, true), base_dir ? base_dir : "");
    const json report = verify_report(cfg ? &*cfg : nullptr, suites_csv ? suites_csv : "");
    if (report_json != nullptr) *report_json = dup_string(report.dump(2));
    if (pass != nullptr) *pass = report.at("pass").get<bool>() ? 1 : 0;
  });
}

jdpp_status jdpp_cmd_moments(const char* config_json, const char* base_dir,
                             const char* const* tuples, int n_tuples, const char* format,
                             char** out_text) {
  return guarded([&] {
    require_arg(config_json != nullptr && out_text != nullptr && n_tuples >= 0, "null argument");
    const jdpp::ExperimentConfig cfg =
        jdpp::parse_config(json::parse(config_json, nullptr, true), base_dir ? base_dir : "");
    const jdpp::JKernelBundle bundle = jdpp::assemble_j_kernel(cfg.kernel, cfg.tol);
    const jdpp::FockSpace fs(bundle.d());
    jdpp::WickEngine engine(bundle, fs);

    json rows = json::array();
    for (int t = 0; t < n_tuples; ++t) {
      const auto deltas = jdpp::parse_delta_tuple(tuples[t], bundle.d());
      rows.push_back(moment_row(engine, deltas));
    }
    const std::string fmt = format ? format : "json";
    if (fmt == "csv") {
      *out_text = dup_string(rows_to_csv(rows));
    } else {
      json doc{{"schema_version", 1}, {"command", "moments"}, {"rows", rows}};
      *out_text = dup_string(doc.dump(2));
    }
  });
}

jdpp_status jdpp_cmd_sample(const char* config_json, const char* base_dir, int override_seed,
                            uint64_t seed, int override_count, int count, char** jsonl,
                            char** summary_json) {
  return guarded([&] {
    require_arg(config_json != nullptr, "null config");
    const jdpp::ExperimentConfig cfg =
        jdpp::parse_config(json::parse(config_json, nullptr, true), base_dir ? base_dir : "");
    const std::uint64_t use_seed = override_seed ? seed : cfg.seed;
    const int use_count = override_count ? count : cfg.count;

    const jdpp::JKernelBundle bundle = jdpp::assemble_j_kernel(cfg.kernel, cfg.tol);
    auto samples = jdpp::hkpv_sample(bundle.K, use_seed, use_count);
    const std::uint64_t m1 = bundle.space().mask1, m2 = bundle.space().mask2;
    if (cfg.pushforward)
      for (auto& m : samples) m = (m & m1) | (m2 & ~m & bundle.space().full_mask());

    // marginals against the diagonal correlation weights
    const jdpp::Matrix& flat = cfg.pushforward ? bundle.Khat.flat : bundle.K.flat;
    const int d = bundle.d();
    std::vector<double> empirical(static_cast<std::size_t>(d), 0.0);
    for (std::uint64_t m : samples)
      for (int i = 0; i < d; ++i)
        if ((m >> i) & 1ull) empirical[static_cast<std::size_t>(i)] += 1.0;

    json marginals = json::array();
    double worst_dev = 0, worst_se_units = 0;
    for (int i = 0; i < d; ++i) {
      const double emp = empirical[static_cast<std::size_t>(i)] / use_count;
      const double expect = flat(i, i).real();
      const double se = std::sqrt(std::max(expect * (1.0 - expect), 1e-12) / use_count);
      worst_dev = std::max(worst_dev, std::abs(emp - expect));
      worst_se_units = std::max(worst_se_units, std::abs(emp - expect) / se);
      marginals.push_back(json{
          {"site", i + 1}, {"empirical", emp}, {"expected", expect}, {"stderr", se}});
    }

    if (jsonl != nullptr) {
      std::ostringstream lines;
      for (std::uint64_t m : samples) lines << m << '\n';
      *jsonl = dup_string(lines.str());
    }
    if (summary_json != nullptr) {
      json summary{{"schema_version", 1},
                   {"command", "sample"},
                   {"count", use_count},
                   {"seed", use_seed},
                   {"pushforward", cfg.pushforward},
                   {"marginals", marginals},
                   {"max_marginal_deviation", worst_dev},
                   {"max_deviation_stderr_units", worst_se_units}};
      *summary_json = dup_string(summary.dump(2));
    }
  });
}

jdpp_status jdpp_dump_operator(const char* config_json, const char* base_dir, const char* subset,
                               char** csv) {
  return guarded([&] {
    require_arg(config_json != nullptr && subset != nullptr && csv != nullptr, "null argument");
    const jdpp::ExperimentConfig cfg =
        jdpp::parse_config(json::parse(config_json, nullptr, true), base_dir ? base_dir : "");
    const jdpp::JKernelBundle bundle = jdpp::assemble_j_kernel(cfg.kernel, cfg.tol);
    const jdpp::FockSpace fs(bundle.d());
    const std::uint64_t mask = jdpp::parse_subset(subset, bundle.d());
    const jdpp::Matrix m = rho_delta(bundle, mask, fs, jdpp::RhoForm::definition).materialized();

    std::ostringstream out;
    out << "row,col,re,im\n";
    out.precision(17);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (std::abs(m(r, c)) <= 1e-15) continue;
        out << bitstring(static_cast<std::uint64_t>(r), fs.modes) << ','
            << bitstring(static_cast<std::uint64_t>(c), fs.modes) << ',' << m(r, c).real() << ','
            << m(r, c).imag() << '\n';
      }
    *csv = dup_string(out.str());
  });
}

jdpp_status jdpp_suite_names(char** csv) {
  return guarded([&] {
    require_arg(csv != nullptr, "null argument");
    std::string joined;
    for (const auto& n : jdpp::suite_names()) {
      if (!joined.empty()) joined += ',';
      joined += n;
    }
    *csv = dup_string(joined);
  });
}

}  // extern "C"
