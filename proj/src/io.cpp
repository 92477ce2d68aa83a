#include "htype/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace htype {

nlohmann::json group_to_json(const HTypeGroup& G) {
  nlohmann::json j;
  j["n"] = G.n();
  j["m"] = G.m();
  auto maps = nlohmann::json::array();
  for (int k = 0; k < G.m(); ++k) {
    const Mat& J = G.J(k);
    std::vector<double> flat(static_cast<size_t>(J.rows()) * J.cols());
    for (int r = 0; r < J.rows(); ++r)
      for (int c = 0; c < J.cols(); ++c) flat[static_cast<size_t>(r) * J.cols() + c] = J(r, c);
    maps.push_back(flat);
  }
  j["J"] = std::move(maps);
  return j;
}

HTypeGroup group_from_json(const nlohmann::json& j, double tol) {
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  if (n < 1 || m < 1) throw std::invalid_argument("group dimensions must be positive");
  const auto& maps = j.at("J");
  if (static_cast<int>(maps.size()) != m)
    throw std::invalid_argument("expected " + std::to_string(m) + " J matrices");
  const int d = 2 * n;
  std::vector<Mat> Js;
  Js.reserve(m);
  for (const auto& entry : maps) {
    auto flat = entry.get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != d * d)
      throw std::invalid_argument("J matrix has wrong size for n");
    Mat J(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) J(r, c) = flat[static_cast<size_t>(r) * d + c];
    Js.push_back(std::move(J));
  }
  return build_custom(Js, tol);
}

void save_group(const HTypeGroup& G, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << group_to_json(G).dump(2) << "\n";
}

HTypeGroup load_group(const std::string& path, double tol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  in >> j;
  return group_from_json(j, tol);
}

HTypeGroup group_from_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string name = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (name == "heisenberg" || name == "quaternionic") {
      int k = 0;
      try {
        size_t pos = 0;
        k = std::stoi(arg, &pos);
        if (pos != arg.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::invalid_argument("bad group parameter in '" + spec + "'");
      }
      if (k < 1) throw std::invalid_argument("group parameter must be >= 1");
      return name == "heisenberg" ? build_heisenberg(k) : build_quaternionic(k);
    }
  }
  return load_group(spec);
}

}  // namespace htype
