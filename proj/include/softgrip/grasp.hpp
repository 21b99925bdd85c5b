#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "softgrip/calibration.hpp"
#include "softgrip/kinematics.hpp"

namespace softgrip {

enum class ObjectShape { Sphere, Box, Pyramid };

std::string_view shape_name(ObjectShape shape);

/// A graspable test object reduced to the circumscribed cylinder of its
/// widest cross-section normal to the gripper axis. Contact is modeled
/// at the fingertips only, with the object centered on the axis.
struct GraspObject {
    ObjectShape shape = ObjectShape::Sphere;
    double characteristic_radius = 0.0; // m
    double center_height = 0.0;         // m, informational
    double mass = 0.0;                  // kg, informational

    static GraspObject sphere(double radius_m, double mass_kg = 0.0,
                              double center_height_m = 0.0);
    /// Square cross-section of the given edge; circumradius edge*sqrt(2)/2.
    static GraspObject box(double edge_m, double mass_kg = 0.0,
                           double center_height_m = 0.0);
    /// Square base of the given edge; circumradius edge*sqrt(2)/2.
    static GraspObject pyramid(double edge_m, double mass_kg = 0.0,
                               double center_height_m = 0.0);

    /// Parses `{"shape":"sphere","radius_m":0.05,"mass_kg":0.1}`; box and
    /// pyramid use "edge_m" instead of "radius_m". "mass_kg" and
    /// "center_height_m" are optional.
    static GraspObject from_json_text(const std::string& text);

    void validate() const;
};

/// A complete decoupled grasp command: the closing shape, the stiffness
/// realized at that shape, and the pressure pair producing both.
struct GraspPlan {
    double phi = 0.0;       // rad
    double stiffness = 0.0; // Nm/rad
    PressureCommand command;
    double aperture = 0.0;  // m, fingertip radial distance at phi

    /// Grip-security rank: ordinal comparison key, lexicographic on
    /// (phi, stiffness). Deeper closure outranks stiffness.
    std::pair<double, double> security_key() const { return {phi, stiffness}; }
};

/// -1, 0, or +1 as a ranks below, equal to, or above b.
int compare_grip_security(const GraspPlan& a, const GraspPlan& b);

/// Bend angle at which the fingertips close onto the object:
/// solves fingertip_aperture(phi) == characteristic_radius by bisection
/// over the strictly decreasing aperture range.
double closure_phi(const GraspObject& object, const FingerParams& params,
                   const GripperParams& gparams);

struct StiffnessTarget {
    double k = 0.0; // Nm/rad
};

struct PressureTarget {
    double p1 = 0.0; // bar
};

/// Full grasp plan with a stiffness target: shape from geometry, pressures
/// from the calibration inverse.
GraspPlan plan_grasp(const CalibrationGrid& grid, const GraspObject& object,
                     const FingerParams& params, const GripperParams& gparams,
                     StiffnessTarget target);

/// Full grasp plan with a stiffness-muscle pressure target.
GraspPlan plan_grasp(const CalibrationGrid& grid, const GraspObject& object,
                     const FingerParams& params, const GripperParams& gparams,
                     PressureTarget target);

} // namespace softgrip
