#include "jdpp/kernel_io.hpp"

#include <fstream>

#include "jdpp/errors.hpp"

namespace jdpp {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const json& m, int d) {
  require(m.contains("re"), Errc::parse_error, "kernel matrix: missing re");
  Matrix out = Matrix::Zero(d, d);
  const auto& re = m.at("re");
  require(static_cast<int>(re.size()) == d, Errc::parse_error, "kernel matrix: wrong row count");
  for (int i = 0; i < d; ++i) {
    require(static_cast<int>(re.at(i).size()) == d, Errc::parse_error,
            "kernel matrix: wrong column count");
    for (int j = 0; j < d; ++j)
      out(i, j) = cplx(re.at(i).at(j).get<double>(), 0.0);
  }
  if (m.contains("im")) {
    const auto& im = m.at("im");
    require(static_cast<int>(im.size()) == d, Errc::parse_error, "kernel matrix: wrong row count");
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        out(i, j) += cplx(0.0, im.at(i).at(j).get<double>());
  }
  return out;
}

}  // namespace

json kernel_to_json(const Kernel& k) {
  json doc;
  doc["schema_version"] = 1;
  doc["d"] = k.d();
  doc["sigma"] = std::vector<double>(k.space.sigma.data(), k.space.sigma.data() + k.d());
  doc["part"] = k.space.part;
  doc["coords"] = "flat";
  doc["matrix"] = matrix_to_json(k.flat);
  return doc;
}

Kernel kernel_from_json(const json& doc) {
  try {
    const int d = doc.at("d").get<int>();
    RealVector sigma = RealVector::Ones(d);
    if (doc.contains("sigma")) {
      const auto s = doc.at("sigma").get<std::vector<double>>();
      require(static_cast<int>(s.size()) == d, Errc::parse_error, "sigma length mismatch");
      for (int i = 0; i < d; ++i) sigma(i) = s[static_cast<std::size_t>(i)];
    }
    std::vector<int> part(static_cast<std::size_t>(d), 1);
    if (doc.contains("part")) part = doc.at("part").get<std::vector<int>>();
    const SpacePartition space = build_space(d, sigma, part);

    const std::string coords = doc.value("coords", "flat");
    require(coords == "flat" || coords == "pointwise", Errc::parse_error,
            "coords must be \"flat\" or \"pointwise\"");
    Matrix m = matrix_from_json(doc.at("matrix"), d);
    return coords == "flat" ? make_kernel_flat(space, std::move(m))
                            : make_kernel_pointwise(space, m);
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("kernel document: ") + e.what());
  }
}

Kernel load_kernel_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io_error, "cannot open kernel file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("kernel file parse: ") + e.what());
  }
  return kernel_from_json(doc);
}

void save_kernel_file(const Kernel& k, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), Errc::io_error, "cannot open output file: " + path);
  out << kernel_to_json(k).dump(2) << "\n";
}

}  // namespace jdpp
