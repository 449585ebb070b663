#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "heavytail/linalg.hpp"

namespace heavytail {

inline constexpr double kBoundaryTolerance = 1e-9;

/// Closed sup-norm neighbourhood {w : ‖w - center‖ <= radius} on the unit sphere.
struct AngularBall {
  Vector center;
  double radius = 0.0;
};

/// {w : w_i > 0 where signs[i] = +1, w_i < 0 where signs[i] = -1}; 0 leaves a
/// coordinate free.
struct OrthantCap {
  std::vector<int> signs;
};

/// Subset of the sup-norm unit sphere: everything, or a finite union of
/// neighbourhoods and orthant caps (empty union = empty set).
struct AngularSet {
  bool everything = false;
  std::vector<AngularBall> balls;
  std::vector<OrthantCap> orthants;

  static AngularSet all() { return AngularSet{true, {}, {}}; }
  static AngularSet none() { return AngularSet{}; }

  /// `w` must lie on the unit sphere.
  bool contains(const Vector& w) const;
  /// Distance-like margin of `w` to the set boundary; +inf when there is none.
  double boundary_margin(const Vector& w) const;
  bool on_boundary(const Vector& w) const { return boundary_margin(w) <= kBoundaryTolerance; }
  bool is_empty() const { return !everything && balls.empty() && orthants.empty(); }
};

/// A = {x : ‖x‖ > level, x/‖x‖ ∈ angular}.
struct ConeSet {
  std::string id;
  double level = 1.0;
  AngularSet angular;

  bool contains(const Vector& x) const;
};

/// Throws ValidationError unless level > 0, dimensions match and the balls
/// are pairwise disjoint.
void validate_cone(const ConeSet& cone, int d);

/// [{"id": "c1", "level": 20, "angular": "all" | "none" |
///   {"balls": [{"center": [1, 0], "radius": 0.5}], "orthants": [{"signs": [1, 0]}]}}]
/// Centers are normalized to sup-norm 1.
std::vector<ConeSet> parse_cones(const nlohmann::json& node, int d);
std::vector<ConeSet> load_cones_file(const std::string& path, int d);

}  // namespace heavytail
