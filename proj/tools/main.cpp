// softgrip command-line tool: forward kinematics, calibration queries,
// grasp planning, and workspace export for the tri-fingered
// variable-stiffness gripper model.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "softgrip/calibration.hpp"
#include "softgrip/error.hpp"
#include "softgrip/grasp.hpp"
#include "softgrip/kinematics.hpp"

namespace {

using nlohmann::json;
using namespace softgrip;

struct CliConfig {
    FingerParams finger;
    GripperParams gripper;
    std::string calibration_path; // empty = built-in dataset
    std::string format = "text";
    std::string output_path;      // empty = stdout
    bool clamp = false;
};

// Shortest decimal form that parses back to the same double (CSV output).
std::string fmt_full(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Text reports use 9 significant digits.
std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Pressures and stiffness in text reports carry the calibration's two
// decimal places.
std::string fmt_bar(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// JSON numbers are rounded to 9 significant digits.
double round9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::strtod(buf, nullptr);
}

json vec3_json(const Eigen::Vector3d& v) {
    return json::array({round9(v.x()), round9(v.y()), round9(v.z())});
}

json rotation_json(const Eigen::Matrix3d& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
        rows.push_back(json::array({round9(m(r, 0)), round9(m(r, 1)), round9(m(r, 2))}));
    }
    return rows;
}

void read_double_field(const json& j, const char* key, double& target) {
    if (!j.contains(key)) {
        return;
    }
    if (!j[key].is_number()) {
        raise(ErrorCode::ParseError,
              std::string("config field '") + key + "' must be a number");
    }
    target = j[key].get<double>();
}

void load_config_file(const std::string& path, CliConfig& cfg) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::ValidationError, "cannot open config file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        raise(ErrorCode::ParseError, "config '" + path + "': " + e.what());
    }
    if (!j.is_object()) {
        raise(ErrorCode::ParseError, "config '" + path + "' must be a JSON object");
    }
    if (j.contains("finger")) {
        const json& f = j["finger"];
        read_double_field(f, "arc_length_m", cfg.finger.arc_length);
        read_double_field(f, "actuator_radius_m", cfg.finger.actuator_radius);
        read_double_field(f, "phi_max_rad", cfg.finger.phi_max);
        read_double_field(f, "pressure_min_bar", cfg.finger.pressure_min);
        read_double_field(f, "pressure_max_bar", cfg.finger.pressure_max);
    }
    if (j.contains("gripper")) {
        const json& g = j["gripper"];
        read_double_field(g, "base_offset_m", cfg.gripper.base_offset);
        read_double_field(g, "mount_angle_rad", cfg.gripper.mount_angle);
    }
    if (j.contains("calibration_csv")) {
        if (!j["calibration_csv"].is_string()) {
            raise(ErrorCode::ParseError, "config field 'calibration_csv' must be a string");
        }
        cfg.calibration_path = j["calibration_csv"].get<std::string>();
    }
    if (j.contains("format")) {
        if (!j["format"].is_string()) {
            raise(ErrorCode::ParseError, "config field 'format' must be a string");
        }
        cfg.format = j["format"].get<std::string>();
    }
}

CalibrationGrid load_grid(const CliConfig& cfg) {
    if (cfg.calibration_path.empty()) {
        return CalibrationGrid::table1();
    }
    return CalibrationGrid::from_csv_file(cfg.calibration_path);
}

void emit(const CliConfig& cfg, const std::string& content) {
    if (cfg.output_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) {
        raise(ErrorCode::ValidationError,
              "cannot open output file '" + cfg.output_path + "'");
    }
    out << content;
}

void require_format(const CliConfig& cfg, std::initializer_list<const char*> allowed) {
    for (const char* f : allowed) {
        if (cfg.format == f) {
            return;
        }
    }
    raise(ErrorCode::ValidationError,
          "format '" + cfg.format + "' is not available for this command");
}

// ---------------------------------------------------------------------------
// fk

std::string run_fk(const CliConfig& cfg, double phi, double xi) {
    require_format(cfg, {"text", "csv", "json"});
    const CurveParams curve = curve_from_phi(phi, cfg.finger);
    std::array<RigidTransform, 3> poses;
    for (int finger = 1; finger <= 3; ++finger) {
        poses[finger - 1] = gripper_finger_transform(finger, curve, xi, cfg.gripper);
    }

    std::ostringstream oss;
    if (cfg.format == "json") {
        json j;
        j["phi_rad"] = round9(phi);
        j["xi"] = round9(xi);
        for (int finger = 1; finger <= 3; ++finger) {
            const RigidTransform& t = poses[finger - 1];
            json entry;
            entry["position"] = vec3_json(t.position);
            entry["rotation"] = rotation_json(t.rotation);
            j["finger_" + std::to_string(finger)] = entry;
        }
        oss << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        oss << "finger,x_m,y_m,z_m,radial_m,height_m,"
               "r00,r01,r02,r10,r11,r12,r20,r21,r22\n";
        for (int finger = 1; finger <= 3; ++finger) {
            const RigidTransform& t = poses[finger - 1];
            oss << finger << "," << fmt_full(t.position.x()) << ","
                << fmt_full(t.position.y()) << "," << fmt_full(t.position.z()) << ","
                << fmt_full(std::hypot(t.position.x(), t.position.y())) << ","
                << fmt_full(t.position.z());
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) {
                    oss << "," << fmt_full(t.rotation(r, c));
                }
            }
            oss << "\n";
        }
    } else {
        oss << "phi=" << fmt_g(phi) << " rad xi=" << fmt_g(xi) << "\n";
        for (int finger = 1; finger <= 3; ++finger) {
            const Eigen::Vector3d& p = poses[finger - 1].position;
            oss << "finger " << finger << ": position=(" << fmt_g(p.x()) << ", "
                << fmt_g(p.y()) << ", " << fmt_g(p.z())
                << ") m radial=" << fmt_g(std::hypot(p.x(), p.y()))
                << " m height=" << fmt_g(p.z()) << " m\n";
        }
    }
    return oss.str();
}

// ---------------------------------------------------------------------------
// command

std::string run_command(const CliConfig& cfg, double phi, std::optional<double> p1,
                        std::optional<double> stiffness) {
    require_format(cfg, {"text", "csv", "json"});
    const CalibrationGrid grid = load_grid(cfg);
    if (cfg.clamp) {
        phi = grid.clamp_phi(phi);
    }

    double out_p1 = 0.0, out_p2 = 0.0, out_k = 0.0;
    if (stiffness) {
        double k = *stiffness;
        if (cfg.clamp) {
            k = grid.clamp_stiffness(phi, k);
        }
        const PressureCommand cmd = grid.inverse_command(phi, k);
        out_p1 = cmd.p1;
        out_p2 = cmd.p2;
        out_k = k;
    } else {
        double p = *p1;
        if (cfg.clamp) {
            p = grid.clamp_p1(p);
        }
        out_p1 = p;
        out_p2 = grid.command_from_target(phi, p);
        out_k = grid.stiffness_from_target(phi, p);
    }

    std::ostringstream oss;
    if (cfg.format == "json") {
        json j;
        j["phi_rad"] = round9(phi);
        j["p1_bar"] = round9(out_p1);
        j["p2_bar"] = round9(out_p2);
        j["k_nm_per_rad"] = round9(out_k);
        oss << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        oss << "phi_rad,p1_bar,p2_bar,k_nm_per_rad\n"
            << fmt_full(phi) << "," << fmt_full(out_p1) << "," << fmt_full(out_p2)
            << "," << fmt_full(out_k) << "\n";
    } else if (stiffness) {
        oss << "P1=" << fmt_bar(out_p1) << " P2=" << fmt_bar(out_p2) << "\n";
    } else {
        oss << "P2=" << fmt_bar(out_p2) << " K=" << fmt_bar(out_k) << "\n";
    }
    return oss.str();
}

// ---------------------------------------------------------------------------
// grasp

std::string run_grasp(const CliConfig& cfg, const std::string& object_path,
                      std::optional<double> p1, std::optional<double> stiffness) {
    require_format(cfg, {"text", "csv", "json"});
    std::ifstream in(object_path);
    if (!in) {
        raise(ErrorCode::ValidationError, "cannot open object file '" + object_path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const GraspObject object = GraspObject::from_json_text(buffer.str());
    const CalibrationGrid grid = load_grid(cfg);

    GraspPlan plan;
    if (cfg.clamp) {
        // Clamp mode assembles the plan around the nearest in-hull shape.
        plan.phi = grid.clamp_phi(closure_phi(object, cfg.finger, cfg.gripper));
        plan.aperture =
            fingertip_aperture(curve_from_phi(plan.phi, cfg.finger), cfg.gripper)
                .radial_distance;
        if (stiffness) {
            plan.stiffness = grid.clamp_stiffness(plan.phi, *stiffness);
            plan.command = grid.inverse_command(plan.phi, plan.stiffness);
        } else {
            const double p = grid.clamp_p1(*p1);
            plan.command = {p, grid.command_from_target(plan.phi, p)};
            plan.stiffness = grid.stiffness_from_target(plan.phi, p);
        }
    } else if (stiffness) {
        plan = plan_grasp(grid, object, cfg.finger, cfg.gripper,
                          StiffnessTarget{*stiffness});
    } else {
        plan = plan_grasp(grid, object, cfg.finger, cfg.gripper, PressureTarget{*p1});
    }

    std::ostringstream oss;
    if (cfg.format == "json") {
        json j;
        j["shape"] = std::string(shape_name(object.shape));
        j["radius_m"] = round9(object.characteristic_radius);
        j["phi_rad"] = round9(plan.phi);
        j["aperture_m"] = round9(plan.aperture);
        j["p1_bar"] = round9(plan.command.p1);
        j["p2_bar"] = round9(plan.command.p2);
        j["k_nm_per_rad"] = round9(plan.stiffness);
        oss << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        oss << "shape,radius_m,phi_rad,aperture_m,p1_bar,p2_bar,k_nm_per_rad\n"
            << shape_name(object.shape) << "," << fmt_full(object.characteristic_radius)
            << "," << fmt_full(plan.phi) << "," << fmt_full(plan.aperture) << ","
            << fmt_full(plan.command.p1) << "," << fmt_full(plan.command.p2) << ","
            << fmt_full(plan.stiffness) << "\n";
    } else {
        oss << "object=" << shape_name(object.shape)
            << " radius=" << fmt_g(object.characteristic_radius) << " m\n"
            << "phi=" << fmt_g(plan.phi) << " rad\n"
            << "aperture=" << fmt_g(plan.aperture) << " m\n"
            << "P1=" << fmt_bar(plan.command.p1) << " P2=" << fmt_bar(plan.command.p2)
            << " K=" << fmt_bar(plan.stiffness) << "\n";
    }
    return oss.str();
}

// ---------------------------------------------------------------------------
// workspace

std::string workspace_svg(const std::vector<WorkspaceSample>& samples) {
    // Side view: gripper X (right) vs Z (up), millimeters.
    std::array<std::vector<std::pair<double, double>>, 3> loci;
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    bool first = true;
    for (const WorkspaceSample& s : samples) {
        for (int f = 0; f < 3; ++f) {
            const double x = s.fingertips[f].x() * 1000.0;
            const double y = -s.fingertips[f].z() * 1000.0;
            loci[f].push_back({x, y});
            if (first) {
                min_x = max_x = x;
                min_y = max_y = y;
                first = false;
            } else {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
        }
    }
    const double margin = 5.0;
    char buf[160];
    std::ostringstream oss;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" "
                  "viewBox=\"%.3f %.3f %.3f %.3f\">\n",
                  min_x - margin, min_y - margin, max_x - min_x + 2.0 * margin,
                  max_y - min_y + 2.0 * margin);
    oss << buf;
    oss << "  <!-- fingertip loci, millimeters, gripper X right / Z up -->\n";
    for (int f = 0; f < 3; ++f) {
        oss << "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"0.5\" "
               "points=\"";
        for (std::size_t i = 0; i < loci[f].size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%s%.3f,%.3f", i == 0 ? "" : " ",
                          loci[f][i].first, loci[f][i].second);
            oss << buf;
        }
        oss << "\"/>\n";
    }
    oss << "</svg>\n";
    return oss.str();
}

std::string run_workspace(const CliConfig& cfg, int n) {
    require_format(cfg, {"text", "csv", "json", "svg"});
    const std::vector<WorkspaceSample> samples =
        sample_workspace(cfg.finger, cfg.gripper, n);

    std::ostringstream oss;
    if (cfg.format == "svg") {
        return workspace_svg(samples);
    }
    if (cfg.format == "json") {
        json arr = json::array();
        for (const WorkspaceSample& s : samples) {
            json entry;
            entry["phi_rad"] = round9(s.phi);
            entry["fingertips"] = json::array({vec3_json(s.fingertips[0]),
                                               vec3_json(s.fingertips[1]),
                                               vec3_json(s.fingertips[2])});
            arr.push_back(entry);
        }
        oss << arr.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        oss << "phi_rad,f1_x_m,f1_y_m,f1_z_m,f2_x_m,f2_y_m,f2_z_m,f3_x_m,f3_y_m,f3_z_m\n";
        for (const WorkspaceSample& s : samples) {
            oss << fmt_full(s.phi);
            for (int f = 0; f < 3; ++f) {
                oss << "," << fmt_full(s.fingertips[f].x()) << ","
                    << fmt_full(s.fingertips[f].y()) << ","
                    << fmt_full(s.fingertips[f].z());
            }
            oss << "\n";
        }
    } else {
        for (const WorkspaceSample& s : samples) {
            oss << "phi=" << fmt_g(s.phi);
            for (int f = 0; f < 3; ++f) {
                oss << " f" << (f + 1) << "=(" << fmt_g(s.fingertips[f].x()) << ", "
                    << fmt_g(s.fingertips[f].y()) << ", " << fmt_g(s.fingertips[f].z())
                    << ")";
            }
            oss << "\n";
        }
    }
    return oss.str();
}

// ---------------------------------------------------------------------------
// calib

std::string run_calib_validate(const CliConfig& cfg, const std::string& file) {
    require_format(cfg, {"text", "csv", "json"});
    CliConfig local = cfg;
    if (!file.empty()) {
        local.calibration_path = file;
    }
    const CalibrationGrid grid = load_grid(local);
    std::ostringstream oss;
    if (cfg.format == "json") {
        json j;
        j["phi_knots"] = json::array();
        j["p1_knots"] = json::array();
        for (double v : grid.phi_knots()) j["phi_knots"].push_back(round9(v));
        for (double v : grid.p1_knots()) j["p1_knots"].push_back(round9(v));
        j["valid"] = true;
        oss << j.dump(2) << "\n";
    } else {
        oss << "OK: " << grid.phi_knots().size() << "x" << grid.p1_knots().size()
            << " grid, phi [" << fmt_g(grid.phi_min()) << ", " << fmt_g(grid.phi_max())
            << "] rad, p1 [" << fmt_g(grid.p1_min()) << ", " << fmt_g(grid.p1_max())
            << "] bar\n";
    }
    return oss.str();
}

std::string run_calib_iso(const CliConfig& cfg, double phi,
                          std::vector<double> p1_samples) {
    require_format(cfg, {"text", "csv", "json"});
    const CalibrationGrid grid = load_grid(cfg);
    if (cfg.clamp) {
        phi = grid.clamp_phi(phi);
        for (double& p : p1_samples) {
            p = grid.clamp_p1(p);
        }
    }
    if (p1_samples.empty()) {
        p1_samples = grid.p1_knots();
    }
    const std::vector<PressureCommand> pairs = grid.iso_phi_curve(phi, p1_samples);

    std::ostringstream oss;
    if (cfg.format == "json") {
        json j;
        j["phi_rad"] = round9(phi);
        j["pairs"] = json::array();
        for (const PressureCommand& c : pairs) {
            j["pairs"].push_back({{"p1_bar", round9(c.p1)}, {"p2_bar", round9(c.p2)}});
        }
        oss << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        oss << "p1_bar,p2_bar\n";
        for (const PressureCommand& c : pairs) {
            oss << fmt_full(c.p1) << "," << fmt_full(c.p2) << "\n";
        }
    } else {
        for (const PressureCommand& c : pairs) {
            oss << "P1=" << fmt_bar(c.p1) << " P2=" << fmt_bar(c.p2) << "\n";
        }
    }
    return oss.str();
}

std::string run_calib_invert(const CliConfig& cfg, double p1, double p2) {
    require_format(cfg, {"text", "csv", "json"});
    const CalibrationGrid grid = load_grid(cfg);
    if (cfg.clamp) {
        p1 = grid.clamp_p1(p1);
        p2 = grid.clamp_p2(p1, p2);
    }
    const double phi = grid.shape_from_pressures(p1, p2);

    std::ostringstream oss;
    if (cfg.format == "json") {
        json j;
        j["p1_bar"] = round9(p1);
        j["p2_bar"] = round9(p2);
        j["phi_rad"] = round9(phi);
        oss << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        oss << "phi_rad\n" << fmt_full(phi) << "\n";
    } else {
        oss << "phi=" << fmt_g(phi) << " rad\n";
    }
    return oss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tri-fingered variable-stiffness soft gripper model"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, calibration_path, format, output_path;
    bool clamp = false;
    double arc_length = 0.0, actuator_radius = 0.0, phi_max = 0.0;
    double sigma = 0.0, mount_angle = 0.0;

    auto* opt_config = app.add_option("--config", config_path, "JSON config file");
    auto* opt_calibration =
        app.add_option("--calibration", calibration_path, "calibration grid CSV");
    auto* opt_format = app.add_option("--format", format, "text, csv, json, or svg")
                           ->check(CLI::IsMember({"text", "csv", "json", "svg"}));
    app.add_flag("--clamp", clamp, "clamp calibration queries to the grid hull");
    app.add_option("-o,--output", output_path, "write the report to this file");
    auto* opt_arc = app.add_option("--arc-length", arc_length, "finger arc length [m]");
    auto* opt_rad =
        app.add_option("--actuator-radius", actuator_radius, "muscle pitch radius [m]");
    auto* opt_phimax = app.add_option("--phi-max", phi_max, "max bend angle [rad]");
    auto* opt_sigma = app.add_option("--sigma", sigma, "base offset along Z [m]");
    auto* opt_mount = app.add_option("--mount-angle", mount_angle, "finger pitch [rad]");

    // fk
    double fk_phi = 0.0, fk_xi = 1.0;
    auto* cmd_fk = app.add_subcommand("fk", "forward kinematics of all three fingers");
    cmd_fk->fallthrough();
    cmd_fk->add_option("--phi", fk_phi, "bend angle [rad]")->required();
    cmd_fk->add_option("--xi", fk_xi, "backbone coordinate in [0,1], default fingertip");

    // command
    double cmd_phi = 0.0;
    double cmd_p1 = 0.0, cmd_k = 0.0;
    auto* cmd_command =
        app.add_subcommand("command", "pressure command for a shape target");
    cmd_command->fallthrough();
    cmd_command->add_option("--phi", cmd_phi, "bend angle [rad]")->required();
    auto* opt_cmd_p1 = cmd_command->add_option("--p1", cmd_p1, "stiffness-muscle pressure [bar]");
    auto* opt_cmd_k =
        cmd_command->add_option("--stiffness", cmd_k, "bending stiffness [Nm/rad]");

    // grasp
    std::string grasp_object;
    double grasp_p1 = 0.0, grasp_k = 0.0;
    auto* cmd_grasp = app.add_subcommand("grasp", "plan a grasp for an object");
    cmd_grasp->fallthrough();
    cmd_grasp->add_option("--object", grasp_object, "object JSON file")->required();
    auto* opt_grasp_p1 =
        cmd_grasp->add_option("--p1", grasp_p1, "stiffness-muscle pressure [bar]");
    auto* opt_grasp_k =
        cmd_grasp->add_option("--stiffness", grasp_k, "bending stiffness [Nm/rad]");

    // workspace
    int workspace_n = 0;
    auto* cmd_workspace =
        app.add_subcommand("workspace", "fingertip loci over the bend range");
    cmd_workspace->fallthrough();
    cmd_workspace->add_option("-n,--samples", workspace_n, "sample count (>= 2)")
        ->required();

    // calib
    auto* cmd_calib = app.add_subcommand("calib", "calibration grid utilities");
    cmd_calib->fallthrough();
    cmd_calib->require_subcommand(1);
    std::string validate_file;
    auto* cmd_validate =
        cmd_calib->add_subcommand("validate", "load and validate a calibration CSV");
    cmd_validate->fallthrough();
    cmd_validate->add_option("file", validate_file, "calibration CSV to validate");
    double iso_phi = 0.0;
    std::vector<double> iso_p1s;
    auto* cmd_iso =
        cmd_calib->add_subcommand("iso", "pressure pairs holding one bend angle");
    cmd_iso->fallthrough();
    cmd_iso->add_option("--phi", iso_phi, "bend angle [rad]")->required();
    cmd_iso->add_option("--p1", iso_p1s, "stiffness-muscle pressures [bar]");
    double invert_p1 = 0.0, invert_p2 = 0.0;
    auto* cmd_invert =
        cmd_calib->add_subcommand("invert", "bend angle from a pressure pair");
    cmd_invert->fallthrough();
    cmd_invert->add_option("--p1", invert_p1, "stiffness-muscle pressure [bar]")->required();
    cmd_invert->add_option("--p2", invert_p2, "bending-pair pressure [bar]")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "ERROR:Usage: " << e.what() << "\n";
        return 2;
    }

    try {
        CliConfig cfg;
        // Precedence: flags > config file > built-in defaults.
        std::string effective_config = config_path;
        if (opt_config->count() == 0) {
            if (const char* env = std::getenv("SOFTGRIP_CONFIG")) {
                effective_config = env;
            }
        }
        if (!effective_config.empty()) {
            load_config_file(effective_config, cfg);
        }
        if (opt_calibration->count() > 0) cfg.calibration_path = calibration_path;
        if (opt_format->count() > 0) cfg.format = format;
        if (opt_arc->count() > 0) cfg.finger.arc_length = arc_length;
        if (opt_rad->count() > 0) cfg.finger.actuator_radius = actuator_radius;
        if (opt_phimax->count() > 0) cfg.finger.phi_max = phi_max;
        if (opt_sigma->count() > 0) cfg.gripper.base_offset = sigma;
        if (opt_mount->count() > 0) cfg.gripper.mount_angle = mount_angle;
        cfg.clamp = clamp;
        cfg.output_path = output_path;
        cfg.finger.validate();
        cfg.gripper.validate();
        if (cfg.format != "text" && cfg.format != "csv" && cfg.format != "json" &&
            cfg.format != "svg") {
            raise(ErrorCode::ValidationError, "unknown format '" + cfg.format + "'");
        }

        std::string report;
        if (cmd_fk->parsed()) {
            report = run_fk(cfg, fk_phi, fk_xi);
        } else if (cmd_command->parsed()) {
            if (opt_cmd_p1->count() + opt_cmd_k->count() != 1) {
                std::cerr << "ERROR:Usage: command needs exactly one of --p1 or --stiffness\n";
                return 2;
            }
            report = run_command(cfg, cmd_phi,
                                 opt_cmd_p1->count() ? std::optional<double>(cmd_p1)
                                                     : std::nullopt,
                                 opt_cmd_k->count() ? std::optional<double>(cmd_k)
                                                    : std::nullopt);
        } else if (cmd_grasp->parsed()) {
            if (opt_grasp_p1->count() + opt_grasp_k->count() != 1) {
                std::cerr << "ERROR:Usage: grasp needs exactly one of --p1 or --stiffness\n";
                return 2;
            }
            report = run_grasp(cfg, grasp_object,
                               opt_grasp_p1->count() ? std::optional<double>(grasp_p1)
                                                     : std::nullopt,
                               opt_grasp_k->count() ? std::optional<double>(grasp_k)
                                                    : std::nullopt);
        } else if (cmd_workspace->parsed()) {
            if (workspace_n < 2) {
                std::cerr << "ERROR:Usage: workspace needs n >= 2\n";
                return 2;
            }
            report = run_workspace(cfg, workspace_n);
        } else if (cmd_calib->parsed()) {
            if (cmd_validate->parsed()) {
                report = run_calib_validate(cfg, validate_file);
            } else if (cmd_iso->parsed()) {
                report = run_calib_iso(cfg, iso_phi, iso_p1s);
            } else {
                report = run_calib_invert(cfg, invert_p1, invert_p2);
            }
        }
        emit(cfg, report);
        return 0;
    } catch (const Error& e) {
        std::cerr << "ERROR:" << e.code_name() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR:Internal: " << e.what() << "\n";
        return 3;
    }
}
