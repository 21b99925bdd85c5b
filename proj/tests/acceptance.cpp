// Acceptance suite: runs every release criterion and prints one
// [PASS]/[FAIL] line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "softgrip/calibration.hpp"
#include "softgrip/grasp.hpp"
#include "softgrip/kinematics.hpp"

using namespace softgrip;
namespace fs = std::filesystem;

namespace {

constexpr double kPhiKnots[4] = {0.4, 0.6, 0.8, 1.0};
constexpr double kP1Knots[4] = {0.50, 0.75, 1.00, 1.25};
constexpr double kP2[4][4] = {{1.86, 1.90, 1.96, 2.09},
                              {2.11, 2.17, 2.24, 2.39},
                              {2.36, 2.42, 2.52, 2.67},
                              {2.60, 2.68, 2.80, 2.98}};
constexpr double kK[4][4] = {{0.63, 0.81, 1.11, 1.32},
                             {0.71, 0.85, 1.40, 1.71},
                             {0.86, 1.42, 1.90, 2.18},
                             {1.56, 1.98, 2.33, 2.58}};

int g_failures = 0;

void run_criterion(int id, const std::string& name, double budget_seconds,
                   const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_seconds > 0.0 && seconds >= budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("[%s] %d. %s (%.3f s)%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                seconds, detail.empty() ? "" : " — ", detail.c_str());
    if (!ok) {
        ++g_failures;
    }
}

std::string bundled_path() { return std::string(SOFTGRIP_DATA_DIR) + "/table1.csv"; }

// --------------------------------------------------------------------------
// subprocess helper for criterion 7

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("softgrip_acceptance." + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    const fs::path out_file = dir / ("out." + std::to_string(++counter));
    const std::string cmd = std::string(SOFTGRIP_CLI_PATH) + " " + args + " >" +
                            out_file.string() + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    RunResult result;
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(out_file, std::ios::binary);
    std::ostringstream oss;
    oss << in.rdbuf();
    result.out = oss.str();
    return result;
}

// --------------------------------------------------------------------------

bool criterion_table1(std::string& detail) {
    const CalibrationGrid grid = CalibrationGrid::from_csv_file(bundled_path());
    int exact = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (grid.command_from_target(kPhiKnots[i], kP1Knots[j]) == kP2[i][j]) {
                ++exact;
            }
            if (grid.stiffness_from_target(kPhiKnots[i], kP1Knots[j]) == kK[i][j]) {
                ++exact;
            }
        }
    }
    std::ostringstream oss;
    oss << exact << "/32 lookups exact";
    detail = oss.str();
    return exact == 32;
}

bool criterion_decoupling(std::string& detail) {
    const CalibrationGrid grid = CalibrationGrid::from_csv_file(bundled_path());
    int checked = 0;
    for (int i = 0; i < 4; ++i) {
        std::vector<double> p1_seen;
        for (int j = 0; j < 4; ++j) {
            const PressureCommand cmd = grid.inverse_command(kPhiKnots[i], kK[i][j]);
            if (std::abs(cmd.p2 - kP2[i][j]) > 1e-9) {
                detail = "p2 mismatch at phi/K row";
                return false;
            }
            const double phi_back = grid.shape_from_pressures(cmd.p1, cmd.p2);
            if (std::abs(phi_back - kPhiKnots[i]) > 1e-6) {
                detail = "phi round-trip failed";
                return false;
            }
            for (double prev : p1_seen) {
                if (std::abs(prev - cmd.p1) < 1e-6) {
                    detail = "commands not distinct";
                    return false;
                }
            }
            p1_seen.push_back(cmd.p1);
            ++checked;
        }
    }
    std::ostringstream oss;
    oss << checked << "/16 decoupled commands verified";
    detail = oss.str();
    return checked == 16;
}

bool criterion_kinematic_invariants(std::string& detail) {
    const FingerParams params;
    const GripperParams gp;
    const int n = 1000;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> phi_dist(1e-9, kPi);
    std::uniform_real_distribution<double> xi_dist(0.0, 1.0);

    for (int i = 0; i < n; ++i) {
        const double phi = phi_dist(rng);
        const CurveParams c = curve_from_phi(phi, params);

        // Inextensibility to 1e-12 relative.
        if (std::abs(c.radius_of_curvature() * c.phi - params.arc_length) >
            1e-12 * params.arc_length) {
            detail = "inextensibility violated";
            return false;
        }

        // Arc-transform group law to 1e-10.
        double xi1 = xi_dist(rng), xi2 = xi_dist(rng);
        if (xi1 + xi2 > 1.0) {
            xi1 *= 0.5;
            xi2 *= 0.5;
        }
        const RigidTransform lhs = finger_transform(c, xi1) * finger_transform(c, xi2);
        const RigidTransform rhs = finger_transform(c, xi1 + xi2);
        if ((lhs.position - rhs.position).norm() > 1e-10 ||
            (lhs.rotation - rhs.rotation).norm() > 1e-10) {
            detail = "group law violated";
            return false;
        }

        // xi = 0 identity to 1e-12.
        const RigidTransform base = finger_transform(c, 0.0);
        if (base.position.norm() > 1e-12 ||
            (base.rotation - Eigen::Matrix3d::Identity()).norm() > 1e-12) {
            detail = "xi=0 identity violated";
            return false;
        }

        // Rigidity to 1e-12.
        const double xi = xi_dist(rng);
        const Eigen::Matrix3d r =
            gripper_finger_transform(1 + i % 3, c, xi, gp).rotation;
        if ((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() > 1e-12 ||
            std::abs(r.determinant() - 1.0) > 1e-12) {
            detail = "rotation not orthonormal";
            return false;
        }

        // Chord law to 1e-10.
        const double chord = finger_transform(c, 1.0).position.norm();
        const double expected = 2.0 * (params.arc_length / phi) * std::sin(phi / 2.0);
        if (std::abs(chord - expected) > 1e-10) {
            detail = "chord law violated";
            return false;
        }

        // 3-fold fingertip symmetry to 1e-12.
        const Eigen::Vector3d t1 = gripper_finger_transform(1, c, 1.0, gp).position;
        const Eigen::Vector3d t2 = gripper_finger_transform(2, c, 1.0, gp).position;
        const Eigen::Vector3d t3 = gripper_finger_transform(3, c, 1.0, gp).position;
        const Eigen::Vector3d e2 =
            rotation_about_z(GripperParams::azimuths[1]).apply(t1);
        const Eigen::Vector3d e3 =
            rotation_about_z(GripperParams::azimuths[2]).apply(t1);
        if ((t2 - e2).norm() > 1e-12 || (t3 - e3).norm() > 1e-12) {
            detail = "3-fold symmetry violated";
            return false;
        }
    }
    std::ostringstream oss;
    oss << n << " randomized cases x 6 invariants";
    detail = oss.str();
    return true;
}

bool criterion_monotonicity(std::string& detail) {
    const CalibrationGrid grid = CalibrationGrid::from_csv_file(bundled_path());
    int comparisons = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j + 1 < 4; ++j) {
            if (!(grid.k_at(i, j + 1) > grid.k_at(i, j))) {
                detail = "K not increasing along P1";
                return false;
            }
            ++comparisons;
        }
    }
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i + 1 < 4; ++i) {
            if (!(grid.k_at(i + 1, j) > grid.k_at(i, j))) {
                detail = "K not increasing along phi";
                return false;
            }
            ++comparisons;
            if (!(grid.p2_at(i + 1, j) > grid.p2_at(i, j))) {
                detail = "P2 not increasing along phi";
                return false;
            }
            ++comparisons;
        }
    }
    std::ostringstream oss;
    oss << comparisons << "/36 strict comparisons hold";
    detail = oss.str();
    return comparisons == 36;
}

bool criterion_oracles(std::string& detail) {
    const FingerParams params;
    const GripperParams gp;
    const CalibrationGrid grid = CalibrationGrid::from_csv_file(bundled_path());

    // closure_phi vs dense sweep at 1e-5 resolution.
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> radius_dist(0.01, 0.10);
    const double step = 1e-5;
    const int max_steps = static_cast<int>(params.phi_max / step);
    for (int trial = 0; trial < 50; ++trial) {
        const double radius = radius_dist(rng);
        const double solved = closure_phi(GraspObject::sphere(radius), params, gp);
        double swept = -1.0;
        double prev_phi = 0.0;
        for (int i = 1; i <= max_steps; ++i) {
            const double phi = step * static_cast<double>(i);
            const double a =
                fingertip_aperture(curve_from_phi(phi, params), gp).radial_distance;
            if (a <= radius) {
                swept = 0.5 * (prev_phi + phi);
                break;
            }
            prev_phi = phi;
        }
        if (swept < 0.0 || std::abs(solved - swept) > 1e-4) {
            detail = "closure disagrees with the dense sweep";
            return false;
        }
    }

    // shape_from_pressures round-trips command_from_target.
    std::uniform_real_distribution<double> phi_dist(grid.phi_min(), grid.phi_max());
    std::uniform_real_distribution<double> p1_dist(grid.p1_min(), grid.p1_max());
    for (int trial = 0; trial < 200; ++trial) {
        const double phi = phi_dist(rng);
        const double p1 = p1_dist(rng);
        const double p2 = grid.command_from_target(phi, p1);
        if (std::abs(grid.shape_from_pressures(p1, p2) - phi) > 1e-9) {
            detail = "shape round-trip beyond 1e-9";
            return false;
        }
    }
    detail = "50 closure sweeps + 200 shape round-trips";
    return true;
}

bool criterion_small_angle(std::string& detail) {
    const FingerParams params;
    const Eigen::Vector3d a =
        finger_transform(curve_from_phi(1e-7, params), 1.0).position;
    const Eigen::Vector3d b =
        finger_transform(curve_from_phi(1e-5, params), 1.0).position;
    const double diff = (a - b).norm();
    std::ostringstream oss;
    oss << "position gap " << diff << " m across the series threshold";
    detail = oss.str();
    return diff < 1e-6;
}

bool criterion_cli(std::string& detail) {
    const RunResult cmd1 = run_cli("command --phi 0.8 --stiffness 1.90");
    if (cmd1.status != 0 || cmd1.out != "P1=1.00 P2=2.52\n") {
        detail = "command output mismatch";
        return false;
    }
    const RunResult iso1 = run_cli("calib iso --phi 1.0");
    if (iso1.status != 0 ||
        iso1.out !=
            "P1=0.50 P2=2.60\nP1=0.75 P2=2.68\nP1=1.00 P2=2.80\nP1=1.25 P2=2.98\n") {
        detail = "iso output mismatch";
        return false;
    }
    const RunResult cmd2 = run_cli("command --phi 0.8 --stiffness 1.90");
    const RunResult iso2 = run_cli("calib iso --phi 1.0");
    if (cmd2.out != cmd1.out || iso2.out != iso1.out) {
        detail = "reruns not byte-identical";
        return false;
    }
    detail = "pinned outputs reproduced, reruns byte-identical";
    return true;
}

} // namespace

int main() {
    run_criterion(1, "Bundled grid reproduction (32 exact lookups)", 1.0,
                  criterion_table1);
    run_criterion(2, "Decoupling: four distinct commands per shape", 0.0,
                  criterion_decoupling);
    run_criterion(3, "Kinematic invariant suite (1000 randomized cases)", 10.0,
                  criterion_kinematic_invariants);
    run_criterion(4, "Grid monotonicity (36 strict comparisons)", 0.0,
                  criterion_monotonicity);
    run_criterion(5, "Oracle equivalence (closure sweep + shape round-trip)", 30.0,
                  criterion_oracles);
    run_criterion(6, "Small-angle stability across the series threshold", 0.0,
                  criterion_small_angle);
    run_criterion(7, "CLI end-to-end determinism", 0.0, criterion_cli);

    std::printf("RESULT: %d/7 criteria passed\n", 7 - g_failures);
    return g_failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
