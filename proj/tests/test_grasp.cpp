#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "softgrip/grasp.hpp"

using namespace softgrip;

namespace {

template <typename F>
ErrorCode code_of(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a softgrip::Error");
    return ErrorCode::Internal;
}

template <typename F>
std::string message_of(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    FAIL("expected a softgrip::Error");
    return {};
}

double radial(double phi, const FingerParams& params, const GripperParams& gp) {
    return fingertip_aperture(curve_from_phi(phi, params), gp).radial_distance;
}

// Brute-force closure: walk phi in 1e-5 steps until the aperture drops
// below the radius, return the bracket midpoint. Accurate to 5e-6.
double closure_oracle(double radius, const FingerParams& params,
                      const GripperParams& gp) {
    const double step = 1e-5;
    const int max_steps = static_cast<int>(params.phi_max / step);
    double prev_phi = 0.0;
    for (int i = 1; i <= max_steps; ++i) {
        const double phi = step * static_cast<double>(i);
        if (radial(phi, params, gp) <= radius) {
            return 0.5 * (prev_phi + phi);
        }
        prev_phi = phi;
    }
    FAIL("oracle found no closure");
    return 0.0;
}

} // namespace

TEST_CASE("object JSON parsing") {
    const GraspObject sphere = GraspObject::from_json_text(
        R"({"shape":"sphere","radius_m":0.05,"mass_kg":0.1})");
    CHECK(sphere.shape == ObjectShape::Sphere);
    CHECK(sphere.characteristic_radius == 0.05);
    CHECK(sphere.mass == 0.1);

    const GraspObject box = GraspObject::from_json_text(
        R"({"shape":"box","edge_m":0.08,"mass_kg":0.1,"center_height_m":-0.07})");
    CHECK(box.characteristic_radius ==
          doctest::Approx(0.08 * std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(box.center_height == -0.07);

    const GraspObject pyramid =
        GraspObject::from_json_text(R"({"shape":"pyramid","edge_m":0.1})");
    CHECK(pyramid.characteristic_radius ==
          doctest::Approx(0.1 * std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(pyramid.mass == 0.0);

    CHECK(code_of([] { GraspObject::from_json_text("not json"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { GraspObject::from_json_text(R"({"shape":"cone","radius_m":1})"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { GraspObject::from_json_text(R"({"shape":"sphere"})"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] {
        GraspObject::from_json_text(R"({"shape":"sphere","radius_m":-0.1})");
    }) == ErrorCode::InvalidParams);
}

TEST_CASE("closure_phi boundary and fixed-point cases") {
    FingerParams params;
    GripperParams gp;

    // Object exactly as wide as the open fingers: closure in the limit.
    CHECK(closure_phi(GraspObject::sphere(radial(0.0, params, gp)), params, gp) == 0.0);

    // Aperture at 0.8 is its own closure angle by construction.
    const double r08 = radial(0.8, params, gp);
    CHECK(closure_phi(GraspObject::sphere(r08), params, gp) ==
          doctest::Approx(0.8).epsilon(1e-6));

    CHECK(code_of([&] { closure_phi(GraspObject::sphere(0.2), params, gp); }) ==
          ErrorCode::NoClosure);
    CHECK(code_of([&] { closure_phi(GraspObject::sphere(1e-6), params, gp); }) ==
          ErrorCode::NoClosure);
}

TEST_CASE("closure_phi agrees with the dense-sweep oracle") {
    FingerParams params;
    GripperParams gp;
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> radius_dist(0.01, 0.10);
    for (int i = 0; i < 50; ++i) {
        const double radius = radius_dist(rng);
        const double solved = closure_phi(GraspObject::sphere(radius), params, gp);
        const double swept = closure_oracle(radius, params, gp);
        CHECK(std::abs(solved - swept) <= 1e-4);
    }
}

TEST_CASE("larger objects close at smaller angles") {
    FingerParams params;
    GripperParams gp;
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> radius_dist(0.01, 0.10);
    for (int i = 0; i < 50; ++i) {
        double r1 = radius_dist(rng);
        double r2 = radius_dist(rng);
        if (r1 == r2) continue;
        if (r1 > r2) std::swap(r1, r2);
        const double phi_small = closure_phi(GraspObject::sphere(r2), params, gp);
        const double phi_large = closure_phi(GraspObject::sphere(r1), params, gp);
        CHECK(phi_large > phi_small);
    }
}

TEST_CASE("plan_grasp hits the calibration targets") {
    FingerParams params;
    GripperParams gp;
    const CalibrationGrid& grid = CalibrationGrid::table1();
    const GraspObject object = GraspObject::sphere(radial(0.8, params, gp), 0.1);

    const GraspPlan by_stiffness =
        plan_grasp(grid, object, params, gp, StiffnessTarget{1.90});
    CHECK(by_stiffness.phi == doctest::Approx(0.8).epsilon(1e-7));
    CHECK(by_stiffness.command.p1 == doctest::Approx(1.00).epsilon(1e-7));
    CHECK(by_stiffness.command.p2 == doctest::Approx(2.52).epsilon(1e-7));
    CHECK(by_stiffness.aperture ==
          doctest::Approx(radial(by_stiffness.phi, params, gp)).epsilon(1e-15));

    // The command must reproduce the plan's shape and stiffness through
    // the grid interpolants.
    CHECK(grid.shape_from_pressures(by_stiffness.command.p1, by_stiffness.command.p2) ==
          doctest::Approx(by_stiffness.phi).epsilon(1e-6));
    CHECK(grid.stiffness_from_target(by_stiffness.phi, by_stiffness.command.p1) ==
          doctest::Approx(by_stiffness.stiffness).epsilon(1e-6));

    const GraspPlan by_pressure =
        plan_grasp(grid, object, params, gp, PressureTarget{0.50});
    CHECK(by_pressure.command.p2 == doctest::Approx(2.36).epsilon(1e-7));
    CHECK(by_pressure.stiffness == doctest::Approx(0.86).epsilon(1e-7));
}

TEST_CASE("decoupling: one shape, ordered stiffness commands") {
    FingerParams params;
    GripperParams gp;
    const CalibrationGrid& grid = CalibrationGrid::table1();
    const GraspObject object = GraspObject::sphere(radial(0.8, params, gp), 0.1);

    const GraspPlan soft = plan_grasp(grid, object, params, gp, StiffnessTarget{0.86});
    const GraspPlan stiff = plan_grasp(grid, object, params, gp, StiffnessTarget{2.18});
    CHECK(soft.phi == stiff.phi); // shape is pure geometry
    CHECK(soft.command.p1 < stiff.command.p1);
    CHECK(soft.command.p2 < stiff.command.p2);
    CHECK(compare_grip_security(soft, stiff) == -1);
    CHECK(compare_grip_security(stiff, soft) == 1);
    CHECK(compare_grip_security(soft, soft) == 0);
}

TEST_CASE("grip security ranks closure depth over stiffness") {
    FingerParams params;
    GripperParams gp;
    const CalibrationGrid& grid = CalibrationGrid::table1();

    const GraspPlan deep = plan_grasp(grid, GraspObject::sphere(radial(0.8, params, gp)),
                                      params, gp, StiffnessTarget{0.86});
    const GraspPlan shallow =
        plan_grasp(grid, GraspObject::sphere(radial(0.6, params, gp)), params, gp,
                   StiffnessTarget{1.71});
    CHECK(compare_grip_security(deep, shallow) == 1);
}

TEST_CASE("plan_grasp propagates hull and closure errors with context") {
    FingerParams params;
    GripperParams gp;
    const CalibrationGrid& grid = CalibrationGrid::table1();

    // Closes at phi = 0.2, below the calibrated range.
    const GraspObject big = GraspObject::sphere(radial(0.2, params, gp));
    const std::string msg = message_of(
        [&] { plan_grasp(grid, big, params, gp, StiffnessTarget{1.0}); });
    CHECK(msg.find("closure phi") != std::string::npos);
    CHECK(msg.find("0.4") != std::string::npos);

    const GraspObject object = GraspObject::sphere(radial(0.8, params, gp));
    CHECK(code_of([&] { plan_grasp(grid, object, params, gp, StiffnessTarget{9.9}); }) ==
          ErrorCode::OutOfHull);
    CHECK(code_of([&] { plan_grasp(grid, object, params, gp, PressureTarget{0.3}); }) ==
          ErrorCode::OutOfHull);
}
