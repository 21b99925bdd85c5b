#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "softgrip/error.hpp"
#include "softgrip/kinematics.hpp"

namespace softgrip {

/// One actuation command: p1 drives the lone stiffness muscle, p2 the
/// bundled bending pair (shared supply line). Gripping mode is p1 <= p2.
struct PressureCommand {
    double p1 = 0.0; // bar
    double p2 = 0.0; // bar

    bool is_gripping_mode() const { return p1 <= p2; }
    void validate(const FingerParams& params) const;
};

/// One stiffness measurement: torque perturbation over the bend-angle
/// perturbation it caused.
struct StiffnessSample {
    double delta_tau = 0.0; // Nm
    double delta_phi = 0.0; // rad
    double k = 0.0;         // Nm/rad

    static StiffnessSample from_perturbation(double delta_tau, double delta_phi);
};

/// K = delta_tau / delta_phi. Throws DegenerateInput for |delta_phi| < 1e-12.
double estimate_stiffness(double delta_tau, double delta_phi);

/// Empirical (phi, P1) -> (P2, K) calibration surface on a rectilinear
/// knot grid, queried by bilinear interpolation (exact at the knots) and
/// inverted by bisection along grid lines. Queries outside the knot
/// rectangle are refused; clamp_* helpers support opt-in clamping.
///
/// Data invariants, checked on every construction path:
///   - knot vectors strictly ascending, at least 2 knots per axis
///   - value matrices dense and positive
///   - P2 strictly increasing along phi at every fixed P1 knot
///   - K strictly increasing along both axes
///
/// Immutable after construction; concurrent reads are safe.
class CalibrationGrid {
public:
    /// Builds and validates a grid from knots and row-major [phi][p1] matrices.
    static CalibrationGrid from_values(std::vector<double> phi_knots,
                                       std::vector<double> p1_knots,
                                       std::vector<double> p2_values,
                                       std::vector<double> k_values);

    /// Parses the calibration CSV format: header line
    /// `phi_rad,p1_bar,p2_bar,k_nm_per_rad`, one row per grid cell in any
    /// order, `#` comment lines allowed.
    static CalibrationGrid from_csv(std::istream& in,
                                    const std::string& source_name = "<stream>");
    static CalibrationGrid from_csv_file(const std::string& path);

    /// The built-in default dataset (4x4 grid, phi in {0.4..1.0} rad,
    /// P1 in {0.50..1.25} bar).
    static const CalibrationGrid& table1();

    const std::vector<double>& phi_knots() const { return phi_knots_; }
    const std::vector<double>& p1_knots() const { return p1_knots_; }
    double phi_min() const { return phi_knots_.front(); }
    double phi_max() const { return phi_knots_.back(); }
    double p1_min() const { return p1_knots_.front(); }
    double p1_max() const { return p1_knots_.back(); }
    double p2_at(std::size_t phi_index, std::size_t p1_index) const;
    double k_at(std::size_t phi_index, std::size_t p1_index) const;

    /// Bending-pair pressure that produces the given shape at the given
    /// stiffness-muscle pressure.
    double command_from_target(double phi, double p1) const;

    /// Bending stiffness obtained at (phi, p1).
    double stiffness_from_target(double phi, double p1) const;

    /// Shape produced by a pressure pair: bisection on the strictly
    /// increasing map phi -> command_from_target(phi, p1).
    double shape_from_pressures(double p1, double p2) const;

    /// Decoupled command solver: finds p1 realizing stiffness k at the
    /// given shape, then the matching p2. Both targets are met to 1e-6
    /// under the grid's interpolants.
    PressureCommand inverse_command(double phi, double k) const;

    /// Pressure pairs holding phi constant across the given p1 samples.
    std::vector<PressureCommand> iso_phi_curve(double phi,
                                               const std::vector<double>& p1_samples) const;

    /// Achievable [min, max] bands along the opposite axis.
    std::pair<double, double> p2_band(double p1) const;
    std::pair<double, double> stiffness_band(double phi) const;

    double clamp_phi(double phi) const;
    double clamp_p1(double p1) const;
    double clamp_p2(double p1, double p2) const;
    double clamp_stiffness(double phi, double k) const;

    /// Canonical serialization (phi-major, shortest round-trip numbers).
    /// Loading the output reproduces this grid exactly.
    void to_csv(std::ostream& out) const;
    std::string to_csv_string() const;

    bool operator==(const CalibrationGrid& other) const = default;

private:
    CalibrationGrid() = default;

    double interpolate(const std::vector<double>& values, double phi, double p1) const;
    void validate(const std::string& source_name) const;

    std::vector<double> phi_knots_;
    std::vector<double> p1_knots_;
    std::vector<double> p2_values_; // row-major [phi][p1]
    std::vector<double> k_values_;  // row-major [phi][p1]
};

/// Muscle length gained per bar under the idealized linear
/// pressure-length model (50% extension at 7 bar).
double linear_pressure_coefficient(const FingerParams& params);

/// Synthetic calibration grid from the idealized linear pressure-length
/// model; for demos and tests only (measured data should come from CSV).
/// phi knots must be positive. The stiffness surface is a common-mode
/// pressure proxy: K = stiffness_per_bar * (P1 + 2*P2).
CalibrationGrid synthetic_grid(const FingerParams& params,
                               std::vector<double> phi_knots,
                               std::vector<double> p1_knots,
                               double stiffness_per_bar = 0.3);

} // namespace softgrip
