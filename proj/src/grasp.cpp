#include "softgrip/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace softgrip {

namespace {

constexpr double kClosureTol = 1e-10;
constexpr int kClosureMaxIter = 200;
constexpr double kHullGrace = 1e-9;
constexpr double kSqrt2Over2 = 0.70710678118654752440;

double radial_at(double phi, const FingerParams& params, const GripperParams& gparams) {
    return fingertip_aperture(curve_from_phi(phi, params), gparams).radial_distance;
}

double json_number(const nlohmann::json& j, const char* key, bool required,
                   double fallback) {
    if (!j.contains(key)) {
        if (required) {
            raise(ErrorCode::ParseError,
                  std::string("object JSON missing required field '") + key + "'");
        }
        return fallback;
    }
    if (!j[key].is_number()) {
        raise(ErrorCode::ParseError,
              std::string("object JSON field '") + key + "' must be a number");
    }
    return j[key].get<double>();
}

} // namespace

std::string_view shape_name(ObjectShape shape) {
    switch (shape) {
        case ObjectShape::Sphere: return "sphere";
        case ObjectShape::Box: return "box";
        case ObjectShape::Pyramid: return "pyramid";
    }
    return "unknown";
}

void GraspObject::validate() const {
    if (!(characteristic_radius > 0.0) || !std::isfinite(characteristic_radius)) {
        raise(ErrorCode::InvalidParams, "object characteristic radius must be positive");
    }
    if (!(mass >= 0.0)) {
        raise(ErrorCode::InvalidParams, "object mass must be non-negative");
    }
}

GraspObject GraspObject::sphere(double radius_m, double mass_kg, double center_height_m) {
    GraspObject o{ObjectShape::Sphere, radius_m, center_height_m, mass_kg};
    o.validate();
    return o;
}

GraspObject GraspObject::box(double edge_m, double mass_kg, double center_height_m) {
    GraspObject o{ObjectShape::Box, edge_m * kSqrt2Over2, center_height_m, mass_kg};
    o.validate();
    return o;
}

GraspObject GraspObject::pyramid(double edge_m, double mass_kg, double center_height_m) {
    GraspObject o{ObjectShape::Pyramid, edge_m * kSqrt2Over2, center_height_m, mass_kg};
    o.validate();
    return o;
}

GraspObject GraspObject::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::ParseError, std::string("object JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("shape") || !j["shape"].is_string()) {
        raise(ErrorCode::ParseError, "object JSON must carry a string field 'shape'");
    }
    const std::string shape = j["shape"].get<std::string>();
    const double mass = json_number(j, "mass_kg", false, 0.0);
    const double center = json_number(j, "center_height_m", false, 0.0);
    if (shape == "sphere") {
        return sphere(json_number(j, "radius_m", true, 0.0), mass, center);
    }
    if (shape == "box") {
        return box(json_number(j, "edge_m", true, 0.0), mass, center);
    }
    if (shape == "pyramid") {
        return pyramid(json_number(j, "edge_m", true, 0.0), mass, center);
    }
    raise(ErrorCode::ParseError,
          "unknown shape '" + shape + "' (expected sphere, box, or pyramid)");
}

int compare_grip_security(const GraspPlan& a, const GraspPlan& b) {
    const auto ka = a.security_key();
    const auto kb = b.security_key();
    if (ka < kb) return -1;
    if (kb < ka) return 1;
    return 0;
}

double closure_phi(const GraspObject& object, const FingerParams& params,
                   const GripperParams& gparams) {
    object.validate();
    const double radius = object.characteristic_radius;
    const double open_aperture = radial_at(0.0, params, gparams);
    if (radius > open_aperture) {
        std::ostringstream oss;
        oss << "object radius " << radius << " m does not fit the open aperture "
            << open_aperture << " m";
        raise(ErrorCode::NoClosure, oss.str());
    }
    if (radius == open_aperture) {
        return 0.0;
    }

    const double phi_end = aperture_monotone_limit(params, gparams);
    if (phi_end <= 0.0) {
        raise(ErrorCode::NotMonotone,
              "radial aperture is not strictly decreasing near phi=0");
    }
    const double closed_aperture = radial_at(phi_end, params, gparams);
    if (radius < closed_aperture) {
        std::ostringstream oss;
        oss << "aperture never reaches object radius " << radius
            << " m (smallest reachable " << closed_aperture << " m at phi=" << phi_end
            << " rad)";
        raise(ErrorCode::NoClosure, oss.str());
    }

    // Aperture decreases over [0, phi_end]; keep the bracket
    // [lo: aperture > radius, hi: aperture <= radius].
    double lo = 0.0;
    double hi = phi_end;
    for (int iter = 0; iter < kClosureMaxIter; ++iter) {
        if (hi - lo <= kClosureTol) {
            return 0.5 * (lo + hi);
        }
        const double mid = 0.5 * (lo + hi);
        if (radial_at(mid, params, gparams) > radius) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    raise(ErrorCode::Internal, "closure bisection failed to converge");
}

namespace {

GraspPlan finish_plan(const CalibrationGrid& grid, const GraspObject& object,
                      const FingerParams& params, const GripperParams& gparams) {
    GraspPlan plan;
    plan.phi = closure_phi(object, params, gparams);
    if (!(plan.phi >= grid.phi_min() - kHullGrace &&
          plan.phi <= grid.phi_max() + kHullGrace)) {
        std::ostringstream oss;
        oss << "closure phi=" << plan.phi << " rad for " << shape_name(object.shape)
            << " (radius " << object.characteristic_radius
            << " m) outside calibrated range [" << grid.phi_min() << ", "
            << grid.phi_max() << "] rad";
        raise(ErrorCode::OutOfHull, oss.str());
    }
    plan.phi = std::clamp(plan.phi, grid.phi_min(), grid.phi_max());
    plan.aperture =
        fingertip_aperture(curve_from_phi(plan.phi, params), gparams).radial_distance;
    return plan;
}

} // namespace

GraspPlan plan_grasp(const CalibrationGrid& grid, const GraspObject& object,
                     const FingerParams& params, const GripperParams& gparams,
                     StiffnessTarget target) {
    GraspPlan plan = finish_plan(grid, object, params, gparams);
    plan.command = grid.inverse_command(plan.phi, target.k);
    plan.stiffness = target.k;
    return plan;
}

GraspPlan plan_grasp(const CalibrationGrid& grid, const GraspObject& object,
                     const FingerParams& params, const GripperParams& gparams,
                     PressureTarget target) {
    GraspPlan plan = finish_plan(grid, object, params, gparams);
    plan.command = {target.p1, grid.command_from_target(plan.phi, target.p1)};
    plan.stiffness = grid.stiffness_from_target(plan.phi, target.p1);
    return plan;
}

} // namespace softgrip
