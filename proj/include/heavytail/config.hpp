#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "heavytail/model.hpp"

namespace heavytail {

/// Builds a validated ModelSpec from a parsed JSON config:
///
///   {"d": 2, "alpha": 1.5, "beta": 2.5, "H": [[...]],
///    "regimes": [{"atoms": [{"direction": [1, 0], "weight": 1}],
///                 "scale": 1, "perturbation": 0,
///                 "matrix": {"kind": "scalar_random", "base": [[...]], "low": 0.2, "high": 1},
///                 "coupled": false}]}
///
/// Matrix kinds: "deterministic" {value}, "scalar_random" {base, low, high},
/// "random_entries" {low, high}; a number in place of a matrix means that
/// multiple of the identity, and "matrix" itself may be a bare matrix or number
/// (deterministic). A regime may give "constant": [...] instead of
/// atoms to fix Q. Directions are renormalized to sup-norm 1; a warning is
/// appended when the correction exceeds 1e-9.
ModelSpec validate_spec(const nlohmann::json& raw, std::vector<std::string>* warnings = nullptr);

nlohmann::json read_json_file(const std::string& path);

ModelSpec load_spec_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// Parses a d×d matrix from nested arrays, or a number c meaning c·I.
Matrix parse_matrix(const nlohmann::json& node, int d, const char* what);
Vector parse_vector(const nlohmann::json& node, const char* what);

InnovationLaw parse_innovation(const nlohmann::json& node, int d, std::vector<std::string>* warnings);
MatrixLaw parse_matrix_law(const nlohmann::json& node, int d);

}  // namespace heavytail
