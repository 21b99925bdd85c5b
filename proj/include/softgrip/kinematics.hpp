#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "softgrip/error.hpp"

namespace softgrip {

inline constexpr double kPi = 3.14159265358979323846;

/// Angle below which the arc-transform trig ratios switch to series forms.
inline constexpr double kSeriesThreshold = 1e-6;

/// Geometric constants of one finger: an inextensible backbone of arc
/// length L actuated by three muscles on a pitch circle of radius r.
/// Muscle 1 sits on +X; muscles 2 and 3 share a line and act together,
/// so the finger bends in its local X-Z plane.
struct FingerParams {
    double arc_length = 0.150;      // m, bending span of the backbone
    double actuator_radius = 0.012; // m, muscle 1 offset from the backbone center
    double phi_max = kPi;           // rad, admissible subtended angle
    double pressure_min = 0.0;      // bar
    double pressure_max = 7.0;      // bar

    void validate() const;
};

/// Muscle length changes. l1 is muscle 1 (+X side), l2 the common length
/// change of the bundled pair. Gripping-mode states satisfy l1 + 2*l2 = 0.
struct JointState {
    double l1 = 0.0; // m
    double l2 = 0.0; // m
};

/// Circular-arc state of a bent finger. The radius of curvature is kept
/// implicit as arc_length / phi so the inextensibility constraint
/// lambda * phi == arc_length holds to the last bit; phi == 0 is the
/// straight-finger limit (infinite radius).
struct CurveParams {
    double phi = 0.0;        // rad, subtended angle
    double arc_length = 0.0; // m

    /// Radius of curvature; +infinity in the straight limit.
    double radius_of_curvature() const { return arc_length / phi; }
};

/// Rotation + position of a frame. Rotations produced by this module are
/// orthonormal with determinant +1 to machine precision.
struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d position = Eigen::Vector3d::Zero();

    static RigidTransform identity() { return {}; }

    RigidTransform operator*(const RigidTransform& rhs) const {
        return {rotation * rhs.rotation, rotation * rhs.position + position};
    }

    Eigen::Vector3d apply(const Eigen::Vector3d& point) const {
        return rotation * point + position;
    }
};

RigidTransform rotation_about_y(double angle);
RigidTransform rotation_about_z(double angle);
RigidTransform translation(const Eigen::Vector3d& offset);

/// Assembly constants of the tri-fingered gripper. Finger 1 is mounted by
/// translating base_offset along Z and pitching mount_angle about Y;
/// fingers 2 and 3 are copies rotated about the central Z axis.
struct GripperParams {
    double base_offset = 0.030;            // m, signed Z offset of the mount ring
    double mount_angle = 0.75 * kPi;       // rad, pitch of each finger from +Z

    static constexpr std::array<double, 3> azimuths = {0.0, 2.0 * kPi / 3.0,
                                                       4.0 * kPi / 3.0};

    void validate() const;
};

/// Arc state for a commanded bend angle. Throws OutOfRange for
/// phi outside [0, phi_max].
CurveParams curve_from_phi(double phi, const FingerParams& params);

/// Arc state from muscle length changes: phi = -l1/r when l1 > l2, else
/// 2*l2/r. Back-bending states (phi < 0) are rejected as OutOfRange.
CurveParams curve_from_joints(const JointState& joints, const FingerParams& params);

/// Gripping-mode muscle lengths for a bend angle: l1 = -r*phi, l2 = r*phi/2.
JointState joints_from_phi(double phi, const FingerParams& params);

/// Pose of the backbone point at normalized arc coordinate xi in [0, 1]
/// (0 = base, 1 = fingertip). The backbone point lies at
/// x = lambda*(1 - cos(xi*phi)), z = lambda*sin(xi*phi), rotated about Y
/// by xi*phi; both products are evaluated in the cancellation-free form
/// L*xi*f(xi*phi) with series fallbacks near zero.
RigidTransform finger_transform(const CurveParams& curve, double xi);

/// Pose of a backbone point of finger 1, 2, or 3 in the gripper frame.
RigidTransform gripper_finger_transform(int finger_index, const CurveParams& curve,
                                        double xi, const GripperParams& gparams);

struct FingertipAperture {
    double radial_distance = 0.0; // m, fingertip distance from the central Z axis
    double height = 0.0;          // m, fingertip z coordinate
};

/// Fingertip aperture at the given bend angle. Identical for all three
/// fingers by symmetry. Strictly decreasing in phi up to the angle where
/// the fingertip crosses the central axis (pi/2 for the default mount).
FingertipAperture fingertip_aperture(const CurveParams& curve,
                                     const GripperParams& gparams);

/// Largest phi such that the radial aperture is strictly decreasing on
/// [0, phi], determined by dense sampling of [0, phi_max]. Conservative
/// by one sample step so the bound holds between samples too.
double aperture_monotone_limit(const FingerParams& params,
                               const GripperParams& gparams, int samples = 4096);

struct WorkspaceSample {
    double phi = 0.0;
    std::array<Eigen::Vector3d, 3> fingertips;
};

/// n fingertip triples at uniformly spaced phi in [0, phi_max], n >= 2.
std::vector<WorkspaceSample> sample_workspace(const FingerParams& params,
                                              const GripperParams& gparams, int n);

} // namespace softgrip
