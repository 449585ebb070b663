#include <cmath>
#include <fstream>
#include <sstream>

#include "heavytail/config.hpp"
#include "heavytail/errors.hpp"

namespace heavytail {

using nlohmann::json;

namespace {

const json& require(const json& node, const char* key) {
  if (!node.is_object() || !node.contains(key)) {
    throw ValidationError(std::string("missing config key '") + key + "'");
  }
  return node.at(key);
}

double number(const json& node, const char* what) {
  if (!node.is_number()) throw ValidationError(std::string(what) + " must be a number");
  return node.get<double>();
}

Matrix parse_square(const json& node, const char* what) {
  if (!node.is_array() || node.empty()) throw ValidationError(std::string(what) + " must be a matrix");
  const auto n = static_cast<Eigen::Index>(node.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = node[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ValidationError(std::string(what) + " must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

}  // namespace

Vector parse_vector(const json& node, const char* what) {
  if (!node.is_array() || node.empty()) throw ValidationError(std::string(what) + " must be a vector");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(node[i], what);
  return v;
}

Matrix parse_matrix(const json& node, int d, const char* what) {
  if (node.is_number()) return node.get<double>() * Matrix::Identity(d, d);
  Matrix m = parse_square(node, what);
  if (m.rows() != d) {
    throw ValidationError(std::string(what) + " must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  return m;
}

InnovationLaw parse_innovation(const json& node, int d, std::vector<std::string>* warnings) {
  if (node.contains("constant")) return ConstantInnovation{parse_vector(node.at("constant"), "constant")};

  ParetoInnovation law;
  const auto& atoms = require(node, "atoms");
  if (!atoms.is_array() || atoms.empty()) throw ValidationError("atoms must be a non-empty array");
  for (const auto& a : atoms) {
    Vector dir = parse_vector(require(a, "direction"), "direction");
    if (dir.size() != d) throw ValidationError("atom dimension mismatch");
    const double norm = sup_norm(dir);
    if (!(norm > 0.0)) throw ValidationError("atom not on unit sphere");
    if (std::abs(norm - 1.0) > 1e-9 && warnings != nullptr) {
      std::ostringstream msg;
      msg << "atom direction renormalized (sup-norm was " << norm << ")";
      warnings->push_back(msg.str());
    }
    law.atoms.atoms.push_back({dir / norm, number(require(a, "weight"), "weight")});
  }
  law.scale = node.contains("scale") ? number(node.at("scale"), "scale") : 1.0;
  law.perturbation = node.contains("perturbation") ? number(node.at("perturbation"), "perturbation") : 0.0;
  return law;
}

MatrixLaw parse_matrix_law(const json& node, int d) {
  if (node.is_number() || node.is_array()) return DeterministicMatrix{parse_matrix(node, d, "matrix")};
  const auto kind = require(node, "kind").get<std::string>();
  if (kind == "deterministic") return DeterministicMatrix{parse_matrix(require(node, "value"), d, "value")};
  if (kind == "scalar_random") {
    return ScalarRandomMatrix{parse_matrix(require(node, "base"), d, "base"), number(require(node, "low"), "low"),
                              number(require(node, "high"), "high")};
  }
  if (kind == "random_entries") {
    return RandomEntriesMatrix{parse_matrix(require(node, "low"), d, "low"),
                               parse_matrix(require(node, "high"), d, "high")};
  }
  throw ValidationError("unknown matrix kind '" + kind + "'");
}

ModelSpec validate_spec(const json& raw, std::vector<std::string>* warnings) {
  if (!raw.is_object()) throw ValidationError("config must be a JSON object");
  const auto& dnode = require(raw, "d");
  if (!dnode.is_number_integer() || dnode.get<int>() < 1) throw ValidationError("dimension must be at least 1");
  const int d = dnode.get<int>();
  const double alpha = number(require(raw, "alpha"), "alpha");
  const double beta = number(require(raw, "beta"), "beta");
  if (!(beta > alpha)) throw ValidationError("beta must exceed alpha");
  const Matrix h = parse_square(require(raw, "H"), "H");

  const auto& rnode = require(raw, "regimes");
  if (!rnode.is_array() || rnode.empty()) throw ValidationError("at least one regime required");
  std::vector<RegimeLaw> regimes;
  for (const auto& r : rnode) {
    RegimeLaw law{parse_innovation(r, d, warnings), parse_matrix_law(require(r, "matrix"), d),
                  r.value("coupled", false)};
    regimes.push_back(std::move(law));
  }
  return ModelSpec(d, alpha, beta, std::move(regimes), h);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

ModelSpec load_spec_file(const std::string& path, std::vector<std::string>* warnings) {
  return validate_spec(read_json_file(path), warnings);
}

}  // namespace heavytail
