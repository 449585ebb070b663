#include <cmath>
#include <limits>

#include "heavytail/config.hpp"
#include "heavytail/cone.hpp"
#include "heavytail/errors.hpp"

namespace heavytail {

namespace {

bool in_orthant(const OrthantCap& cap, const Vector& w) {
  for (std::size_t i = 0; i < cap.signs.size(); ++i) {
    const double v = w(static_cast<Eigen::Index>(i));
    if (cap.signs[i] > 0 && !(v > 0.0)) return false;
    if (cap.signs[i] < 0 && !(v < 0.0)) return false;
  }
  return true;
}

}  // namespace

bool AngularSet::contains(const Vector& w) const {
  if (everything) return true;
  for (const auto& b : balls) {
    if (sup_norm(w - b.center) <= b.radius) return true;
  }
  for (const auto& o : orthants) {
    if (in_orthant(o, w)) return true;
  }
  return false;
}

double AngularSet::boundary_margin(const Vector& w) const {
  double margin = std::numeric_limits<double>::infinity();
  if (everything) return margin;
  for (const auto& b : balls) margin = std::min(margin, std::abs(sup_norm(w - b.center) - b.radius));
  for (const auto& o : orthants) {
    for (std::size_t i = 0; i < o.signs.size(); ++i) {
      if (o.signs[i] != 0) margin = std::min(margin, std::abs(w(static_cast<Eigen::Index>(i))));
    }
  }
  return margin;
}

bool ConeSet::contains(const Vector& x) const {
  const double norm = sup_norm(x);
  return norm > level && angular.contains(x / norm);
}

void validate_cone(const ConeSet& cone, int d) {
  if (!(cone.level > 0.0) || !std::isfinite(cone.level)) throw ValidationError("cone level must be positive");
  for (const auto& b : cone.angular.balls) {
    if (b.center.size() != d) throw ValidationError("cone center dimension mismatch");
    if (std::abs(sup_norm(b.center) - 1.0) > 1e-12) throw ValidationError("cone center not on unit sphere");
    if (!(b.radius > 0.0)) throw ValidationError("cone radius must be positive");
  }
  for (const auto& o : cone.angular.orthants) {
    if (static_cast<int>(o.signs.size()) != d) throw ValidationError("orthant sign dimension mismatch");
    for (int s : o.signs) {
      if (s < -1 || s > 1) throw ValidationError("orthant signs must be -1, 0 or 1");
    }
  }
  const auto& balls = cone.angular.balls;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      if (sup_norm(balls[i].center - balls[j].center) <= balls[i].radius + balls[j].radius) {
        throw ValidationError("cone neighbourhoods must be pairwise disjoint");
      }
    }
  }
}

std::vector<ConeSet> parse_cones(const nlohmann::json& node, int d) {
  const auto& list = node.is_object() && node.contains("cones") ? node.at("cones") : node;
  if (!list.is_array()) throw ValidationError("cones must be an array");
  std::vector<ConeSet> cones;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const auto& c = list[k];
    ConeSet cone;
    cone.id = c.value("id", "cone" + std::to_string(k));
    if (!c.contains("level")) throw ValidationError("cone needs a level");
    cone.level = c.at("level").get<double>();
    const auto& ang = c.contains("angular") ? c.at("angular") : nlohmann::json("all");
    if (ang.is_string()) {
      const auto tag = ang.get<std::string>();
      if (tag == "all") {
        cone.angular = AngularSet::all();
      } else if (tag != "none") {
        throw ValidationError("angular must be 'all', 'none' or an object");
      }
    } else {
      for (const auto& b : ang.value("balls", nlohmann::json::array())) {
        Vector center = parse_vector(b.at("center"), "center");
        const double norm = sup_norm(center);
        if (!(norm > 0.0)) throw ValidationError("cone center not on unit sphere");
        cone.angular.balls.push_back({center / norm, b.at("radius").get<double>()});
      }
      for (const auto& o : ang.value("orthants", nlohmann::json::array())) {
        cone.angular.orthants.push_back({o.at("signs").get<std::vector<int>>()});
      }
    }
    validate_cone(cone, d);
    cones.push_back(std::move(cone));
  }
  return cones;
}

std::vector<ConeSet> load_cones_file(const std::string& path, int d) {
  return parse_cones(read_json_file(path), d);
}

}  // namespace heavytail
