// SPDX-License-Identifier: Apache-2.0
#include <nlohmann/json.hpp>

#include "locbeam/conic.hpp"
#include "locbeam/error.hpp"

namespace locbeam::conic {

namespace {

const char* kind_name(ConeKind k) {
  switch (k) {
    case ConeKind::kZero:
      return "zero";
    case ConeKind::kNonneg:
      return "nonneg";
    case ConeKind::kPsd:
      return "psd";
    case ConeKind::kExp:
      return "exp";
  }
  return "?";
}

ConeKind kind_from(const std::string& s) {
  if (s == "zero") return ConeKind::kZero;
  if (s == "nonneg") return ConeKind::kNonneg;
  if (s == "psd") return ConeKind::kPsd;
  if (s == "exp") return ConeKind::kExp;
  throw InvalidArgument("unknown cone kind: " + s);
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), v.size()); }

}  // namespace

void to_json(nlohmann::json& j, const ConicProblem& p) {
  nlohmann::json cones = nlohmann::json::array();
  for (const Cone& c : p.cones.cones) cones.push_back({{"kind", kind_name(c.kind)}, {"size", c.size}});
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index r = 0; r < p.a.rows(); ++r) a.push_back(to_std(p.a.row(r).transpose()));
  j = nlohmann::json{{"c", to_std(p.c)}, {"A", a}, {"b", to_std(p.b)}, {"cones", cones}};
}

void from_json(const nlohmann::json& j, ConicProblem& p) {
  p.c = from_std(j.at("c").get<std::vector<double>>());
  p.b = from_std(j.at("b").get<std::vector<double>>());
  const auto& a = j.at("A");
  p.a = Matrix::Zero(p.m(), p.n());
  if (static_cast<int>(a.size()) != p.m()) throw DimensionMismatch("A row count differs from b");
  for (int r = 0; r < p.m(); ++r) {
    const auto row = a.at(r).get<std::vector<double>>();
    if (static_cast<int>(row.size()) != p.n()) throw DimensionMismatch("A column count differs from c");
    p.a.row(r) = from_std(row).transpose();
  }
  p.cones.cones.clear();
  for (const auto& c : j.at("cones")) p.cones.cones.push_back({kind_from(c.at("kind")), c.at("size").get<int>()});
  p.validate();
}

}  // namespace locbeam::conic
