#include "softgrip/kinematics.hpp"

#include <cmath>
#include <sstream>

namespace softgrip {

namespace {

// sin(t)/t with a series fallback below the threshold.
double sinc(double t) {
    if (std::abs(t) < kSeriesThreshold) {
        return 1.0 - t * t / 6.0;
    }
    return std::sin(t) / t;
}

// (1 - cos(t))/t with a series fallback below the threshold.
double one_minus_cos_over(double t) {
    if (std::abs(t) < kSeriesThreshold) {
        return 0.5 * t - t * t * t / 24.0;
    }
    return (1.0 - std::cos(t)) / t;
}

std::string format_range(double lo, double hi) {
    std::ostringstream oss;
    oss << "[" << lo << ", " << hi << "]";
    return oss.str();
}

void check_phi_range(double phi, const FingerParams& params) {
    if (!(phi >= 0.0 && phi <= params.phi_max)) {
        std::ostringstream oss;
        oss << "phi=" << phi << " rad outside admissible range "
            << format_range(0.0, params.phi_max) << " rad";
        raise(ErrorCode::OutOfRange, oss.str());
    }
}

} // namespace

void FingerParams::validate() const {
    if (!(arc_length > 0.0)) {
        raise(ErrorCode::InvalidParams, "arc_length must be positive");
    }
    if (!(actuator_radius > 0.0)) {
        raise(ErrorCode::InvalidParams, "actuator_radius must be positive");
    }
    if (!(actuator_radius < arc_length)) {
        raise(ErrorCode::InvalidParams, "actuator_radius must be smaller than arc_length");
    }
    if (!(phi_max > 0.0 && phi_max <= kPi)) {
        raise(ErrorCode::InvalidParams, "phi_max must lie in (0, pi]");
    }
    if (!(pressure_min <= pressure_max)) {
        raise(ErrorCode::InvalidParams, "pressure_min must not exceed pressure_max");
    }
}

void GripperParams::validate() const {
    if (!(mount_angle > kPi / 2.0 && mount_angle < kPi)) {
        raise(ErrorCode::InvalidParams, "mount_angle must lie in (pi/2, pi)");
    }
}

RigidTransform rotation_about_y(double angle) {
    RigidTransform t;
    t.rotation = Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitY()).toRotationMatrix();
    return t;
}

RigidTransform rotation_about_z(double angle) {
    RigidTransform t;
    t.rotation = Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    return t;
}

RigidTransform translation(const Eigen::Vector3d& offset) {
    RigidTransform t;
    t.position = offset;
    return t;
}

CurveParams curve_from_phi(double phi, const FingerParams& params) {
    params.validate();
    check_phi_range(phi, params);
    return {phi, params.arc_length};
}

CurveParams curve_from_joints(const JointState& joints, const FingerParams& params) {
    params.validate();
    const double r = params.actuator_radius;
    // Bending direction follows the longer side of the antagonistic pair.
    const double phi = (joints.l1 > joints.l2) ? -joints.l1 / r : 2.0 * joints.l2 / r;
    if (phi < 0.0) {
        std::ostringstream oss;
        oss << "joint state (l1=" << joints.l1 << ", l2=" << joints.l2
            << ") implies back-bending (phi=" << phi
            << " rad); only phi >= 0 is modeled";
        raise(ErrorCode::OutOfRange, oss.str());
    }
    check_phi_range(phi, params);
    return {phi, params.arc_length};
}

JointState joints_from_phi(double phi, const FingerParams& params) {
    params.validate();
    check_phi_range(phi, params);
    const double common = params.actuator_radius * phi;
    // l1 + 2*l2 == 0 holds exactly: both terms derive from the same product.
    return {-common, common / 2.0};
}

RigidTransform finger_transform(const CurveParams& curve, double xi) {
    if (!(xi >= 0.0 && xi <= 1.0)) {
        std::ostringstream oss;
        oss << "xi=" << xi << " outside [0, 1]";
        raise(ErrorCode::OutOfRange, oss.str());
    }
    const double theta = xi * curve.phi;
    RigidTransform t = rotation_about_y(theta);
    // x = lambda*(1 - cos(theta)), z = lambda*sin(theta); written as
    // L*xi*f(theta) so the straight limit needs no special case.
    const double s = curve.arc_length * xi;
    t.position = Eigen::Vector3d(s * one_minus_cos_over(theta), 0.0, s * sinc(theta));
    return t;
}

RigidTransform gripper_finger_transform(int finger_index, const CurveParams& curve,
                                        double xi, const GripperParams& gparams) {
    if (finger_index < 1 || finger_index > 3) {
        std::ostringstream oss;
        oss << "finger index " << finger_index << " not in {1, 2, 3}";
        raise(ErrorCode::InvalidIndex, oss.str());
    }
    gparams.validate();
    const RigidTransform mounted =
        translation(Eigen::Vector3d(0.0, 0.0, gparams.base_offset)) *
        rotation_about_y(gparams.mount_angle) * finger_transform(curve, xi);
    if (finger_index == 1) {
        return mounted;
    }
    return rotation_about_z(GripperParams::azimuths[finger_index - 1]) * mounted;
}

FingertipAperture fingertip_aperture(const CurveParams& curve,
                                     const GripperParams& gparams) {
    const Eigen::Vector3d tip = gripper_finger_transform(1, curve, 1.0, gparams).position;
    return {std::hypot(tip.x(), tip.y()), tip.z()};
}

double aperture_monotone_limit(const FingerParams& params,
                               const GripperParams& gparams, int samples) {
    params.validate();
    gparams.validate();
    if (samples < 2) {
        raise(ErrorCode::InvalidParams, "samples must be >= 2");
    }
    // The radial aperture minimum (the fingertip crossing the central
    // axis) can hide between samples, so a sampled decreasing prefix may
    // overshoot it by one step. Returning the second-to-last decreasing
    // sample keeps the result inside the truly decreasing range.
    double limit = 0.0;
    double prev_limit = 0.0;
    double prev = fingertip_aperture(curve_from_phi(0.0, params), gparams).radial_distance;
    for (int i = 1; i < samples; ++i) {
        const double phi = params.phi_max * static_cast<double>(i) /
                           static_cast<double>(samples - 1);
        const double a =
            fingertip_aperture(curve_from_phi(phi, params), gparams).radial_distance;
        if (!(a < prev)) {
            break;
        }
        prev_limit = limit;
        limit = phi;
        prev = a;
    }
    return prev_limit;
}

std::vector<WorkspaceSample> sample_workspace(const FingerParams& params,
                                              const GripperParams& gparams, int n) {
    params.validate();
    gparams.validate();
    if (n < 2) {
        raise(ErrorCode::InvalidParams, "workspace sample count must be >= 2");
    }
    std::vector<WorkspaceSample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double phi =
            params.phi_max * static_cast<double>(i) / static_cast<double>(n - 1);
        const CurveParams curve = curve_from_phi(phi, params);
        WorkspaceSample sample;
        sample.phi = phi;
        for (int finger = 1; finger <= 3; ++finger) {
            sample.fingertips[finger - 1] =
                gripper_finger_transform(finger, curve, 1.0, gparams).position;
        }
        out.push_back(sample);
    }
    return out;
}

} // namespace softgrip
