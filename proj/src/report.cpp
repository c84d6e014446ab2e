#include "jdpp/report.hpp"

#include <sstream>

#include "jdpp/errors.hpp"

namespace jdpp {

using nlohmann::json;

std::string format_subset(std::uint64_t mask, int d) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (int i = 0; i < d; ++i) {
    if (!((mask >> i) & 1ull)) continue;
    if (!first) out << ',';
    out << (i + 1);
    first = false;
  }
  out << '}';
  return out.str();
}

std::string format_deltas(std::span<const std::uint64_t> masks, int d) {
  std::ostringstream out;
  for (std::size_t t = 0; t < masks.size(); ++t) {
    if (t) out << '|';
    out << format_subset(masks[t], d);
  }
  return out.str();
}

std::uint64_t parse_subset(const std::string& text, int d) {
  std::string body = text;
  if (!body.empty() && body.front() == '{') {
    require(body.back() == '}', Errc::parse_error, "unbalanced braces in subset: " + text);
    body = body.substr(1, body.size() - 2);
  }
  std::uint64_t mask = 0;
  std::stringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    int site = 0;
    try {
      site = std::stoi(item);
    } catch (const std::exception&) {
      fail(Errc::parse_error, "bad site index '" + item + "' in subset: " + text);
    }
    require(site >= 1 && site <= d, Errc::parse_error,
            "site " + std::to_string(site) + " out of range 1.." + std::to_string(d));
    mask |= (1ull << (site - 1));
  }
  return mask;
}

std::vector<std::uint64_t> parse_delta_tuple(const std::string& text, int d) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, '|')) out.push_back(parse_subset(part, d));
  require(!out.empty(), Errc::parse_error, "empty delta tuple: " + text);
  return out;
}

json to_json(const ValidationReport& r) {
  return json{{"hermiticity_residual", r.hermiticity_residual},
              {"min_eigenvalue", r.min_eigenvalue},
              {"max_eigenvalue", r.max_eigenvalue},
              {"tol", r.tol},
              {"hermitian", r.hermitian},
              {"bounds_ok", r.bounds_ok},
              {"locally_trace_class", r.locally_trace_class},
              {"pass", r.pass},
              {"note", r.note}};
}

json to_json(const JsaReport& r) {
  return json{{"ok", r.ok},
              {"res_block11", r.res_block11},
              {"res_block22", r.res_block22},
              {"res_cross", r.res_cross},
              {"max_residual", r.max_residual}};
}

json to_json(const BundleCertificate& c) {
  return json{{"base", to_json(c.base)},
              {"sqrt_residual_k1", c.sqrt_residual_k1},
              {"sqrt_residual_k2", c.sqrt_residual_k2},
              {"block11_residual", c.block11_residual},
              {"block22_residual", c.block22_residual},
              {"block21_residual", c.block21_residual},
              {"block12_residual", c.block12_residual},
              {"hat_involution_residual", c.hat_involution_residual},
              {"j_self_adjoint", to_json(c.jsa)},
              {"pass", c.pass},
              {"note", c.note}};
}

json to_json(const GrowthConstant& g) {
  json out{{"general", g.general},
           {"trace_norm_sum", g.trace_norm_sum},
           {"frobenius_norm", g.frobenius_norm},
           {"operator_norm", g.operator_norm}};
  if (g.refined) out["refined"] = *g.refined;
  return out;
}

json to_json(const MomentReport& r, int d) {
  json out{{"n", r.deltas.size()},
           {"deltas", format_deltas(r.deltas, d)},
           {"fock", r.value_fock},
           {"cycle", r.value_cycle},
           {"det", r.value_det},
           {"max_disc", r.max_discrepancy}};
  out["pairing"] = r.value_pairing ? json(*r.value_pairing) : json(nullptr);
  return out;
}

json to_json(const DppTable& t) {
  return json{{"schema_version", 1},
              {"d", t.space.d},
              {"probs", t.probs},
              {"clamp_residual", t.clamp_residual}};
}

}  // namespace jdpp
