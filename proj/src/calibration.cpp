#include "softgrip/calibration.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace softgrip {

namespace {

constexpr const char* kCsvHeader = "phi_rad,p1_bar,p2_bar,k_nm_per_rad";
constexpr double kBisectionTol = 1e-9;
constexpr int kBisectionMaxIter = 200;

// Targets this close to a band edge are treated as the edge itself, so
// band-edge commands survive last-digit noise in upstream solvers.
constexpr double kHullGrace = 1e-9;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& field, const std::string& source, int line) {
    const std::string token = trim(field);
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || token.empty()) {
        std::ostringstream oss;
        oss << source << ": line " << line << ": malformed number '" << field << "'";
        raise(ErrorCode::ParseError, oss.str());
    }
    if (!std::isfinite(value)) {
        std::ostringstream oss;
        oss << source << ": line " << line << ": non-finite number '" << field << "'";
        raise(ErrorCode::ParseError, oss.str());
    }
    return value;
}

std::string format_cell(double phi, double p1) {
    std::ostringstream oss;
    oss << "(phi=" << phi << ", p1=" << p1 << ")";
    return oss.str();
}

std::string format_band(double lo, double hi) {
    std::ostringstream oss;
    oss << "[" << lo << ", " << hi << "]";
    return oss.str();
}

// Shortest decimal form that parses back to the same double.
std::string format_number(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

// Cell index and local coordinate along one knot axis; the query must
// already be inside [knots.front(), knots.back()]. Exact 0/1 local
// coordinates at the knots keep interpolation exact there.
struct AxisPosition {
    std::size_t cell;
    double t;
};

AxisPosition locate(const std::vector<double>& knots, double x) {
    const auto it = std::upper_bound(knots.begin(), knots.end(), x);
    std::size_t cell = static_cast<std::size_t>(std::distance(knots.begin(), it));
    cell = (cell == 0) ? 0 : cell - 1;
    cell = std::min(cell, knots.size() - 2);
    const double t = (x - knots[cell]) / (knots[cell + 1] - knots[cell]);
    return {cell, t};
}

// Bisection for a strictly increasing objective on [lo, hi] with
// f(lo) <= 0 <= f(hi). Interval tolerance per the calibration contract.
template <typename F>
double bisect_increasing(F&& f, double lo, double hi) {
    double f_lo = f(lo);
    if (f_lo == 0.0) {
        return lo;
    }
    if (f(hi) == 0.0) {
        return hi;
    }
    for (int iter = 0; iter < kBisectionMaxIter; ++iter) {
        if (hi - lo <= kBisectionTol) {
            return 0.5 * (lo + hi);
        }
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    raise(ErrorCode::Internal, "bisection failed to converge");
}

} // namespace

void PressureCommand::validate(const FingerParams& params) const {
    if (!(p1 >= params.pressure_min && p1 <= params.pressure_max) ||
        !(p2 >= params.pressure_min && p2 <= params.pressure_max)) {
        std::ostringstream oss;
        oss << "pressure command (" << p1 << ", " << p2 << ") bar outside supply range "
            << format_band(params.pressure_min, params.pressure_max) << " bar";
        raise(ErrorCode::OutOfRange, oss.str());
    }
}

StiffnessSample StiffnessSample::from_perturbation(double delta_tau, double delta_phi) {
    return {delta_tau, delta_phi, estimate_stiffness(delta_tau, delta_phi)};
}

double estimate_stiffness(double delta_tau, double delta_phi) {
    if (std::abs(delta_phi) < 1e-12) {
        raise(ErrorCode::DegenerateInput,
              "bend-angle perturbation too small to estimate stiffness");
    }
    return delta_tau / delta_phi;
}

double CalibrationGrid::p2_at(std::size_t phi_index, std::size_t p1_index) const {
    return p2_values_[phi_index * p1_knots_.size() + p1_index];
}

double CalibrationGrid::k_at(std::size_t phi_index, std::size_t p1_index) const {
    return k_values_[phi_index * p1_knots_.size() + p1_index];
}

void CalibrationGrid::validate(const std::string& source_name) const {
    const std::size_t np = phi_knots_.size();
    const std::size_t nq = p1_knots_.size();
    if (np < 2 || nq < 2) {
        raise(ErrorCode::ValidationError,
              source_name + ": grid needs at least 2 knots per axis");
    }
    if (p2_values_.size() != np * nq || k_values_.size() != np * nq) {
        raise(ErrorCode::ValidationError, source_name + ": non-rectangular grid");
    }
    for (std::size_t i = 1; i < np; ++i) {
        if (!(phi_knots_[i] > phi_knots_[i - 1])) {
            raise(ErrorCode::ValidationError,
                  source_name + ": phi knots not strictly ascending at phi=" +
                      format_number(phi_knots_[i]));
        }
    }
    for (std::size_t j = 1; j < nq; ++j) {
        if (!(p1_knots_[j] > p1_knots_[j - 1])) {
            raise(ErrorCode::ValidationError,
                  source_name + ": p1 knots not strictly ascending at p1=" +
                      format_number(p1_knots_[j]));
        }
    }
    if (!(phi_knots_.front() >= 0.0) || !(p1_knots_.front() >= 0.0)) {
        raise(ErrorCode::ValidationError, source_name + ": knots must be non-negative");
    }
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = 0; j < nq; ++j) {
            if (!(p2_at(i, j) > 0.0) || !std::isfinite(p2_at(i, j)) ||
                !(k_at(i, j) > 0.0) || !std::isfinite(k_at(i, j))) {
                raise(ErrorCode::ValidationError,
                      source_name + ": non-positive entry at cell " +
                          format_cell(phi_knots_[i], p1_knots_[j]));
            }
        }
    }
    // P2 must grow with the bend angle at every stiffness-muscle pressure.
    for (std::size_t j = 0; j < nq; ++j) {
        for (std::size_t i = 1; i < np; ++i) {
            if (!(p2_at(i, j) > p2_at(i - 1, j))) {
                raise(ErrorCode::ValidationError,
                      source_name + ": p2 not strictly increasing along phi at cell " +
                          format_cell(phi_knots_[i], p1_knots_[j]));
            }
        }
    }
    // K must grow along both axes; this is what makes the inverses well posed.
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = 1; j < nq; ++j) {
            if (!(k_at(i, j) > k_at(i, j - 1))) {
                raise(ErrorCode::ValidationError,
                      source_name + ": k not strictly increasing along p1 at cell " +
                          format_cell(phi_knots_[i], p1_knots_[j]));
            }
        }
    }
    for (std::size_t j = 0; j < nq; ++j) {
        for (std::size_t i = 1; i < np; ++i) {
            if (!(k_at(i, j) > k_at(i - 1, j))) {
                raise(ErrorCode::ValidationError,
                      source_name + ": k not strictly increasing along phi at cell " +
                          format_cell(phi_knots_[i], p1_knots_[j]));
            }
        }
    }
}

CalibrationGrid CalibrationGrid::from_values(std::vector<double> phi_knots,
                                             std::vector<double> p1_knots,
                                             std::vector<double> p2_values,
                                             std::vector<double> k_values) {
    CalibrationGrid grid;
    grid.phi_knots_ = std::move(phi_knots);
    grid.p1_knots_ = std::move(p1_knots);
    grid.p2_values_ = std::move(p2_values);
    grid.k_values_ = std::move(k_values);
    grid.validate("<values>");
    return grid;
}

CalibrationGrid CalibrationGrid::from_csv(std::istream& in,
                                          const std::string& source_name) {
    struct Row {
        double phi, p1, p2, k;
        int line;
    };
    std::vector<Row> rows;
    bool header_seen = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string content = trim(line);
        if (content.empty() || content.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (content != kCsvHeader) {
                std::ostringstream oss;
                oss << source_name << ": line " << lineno << ": expected header '"
                    << kCsvHeader << "'";
                raise(ErrorCode::ParseError, oss.str());
            }
            header_seen = true;
            continue;
        }
        std::array<std::string, 4> fields;
        std::size_t field_count = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = content.find(',', start);
            const std::string field = content.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (field_count < fields.size()) {
                fields[field_count] = field;
            }
            ++field_count;
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (field_count != 4) {
            std::ostringstream oss;
            oss << source_name << ": line " << lineno << ": expected 4 fields, got "
                << field_count;
            raise(ErrorCode::ParseError, oss.str());
        }
        rows.push_back({parse_double(fields[0], source_name, lineno),
                        parse_double(fields[1], source_name, lineno),
                        parse_double(fields[2], source_name, lineno),
                        parse_double(fields[3], source_name, lineno), lineno});
    }
    if (!header_seen) {
        raise(ErrorCode::ParseError, source_name + ": missing header line");
    }
    if (rows.empty()) {
        raise(ErrorCode::ParseError, source_name + ": no data rows");
    }

    // Canonicalize: knots are the sorted unique coordinate values, so row
    // order in the file does not matter.
    std::vector<double> phi_knots;
    std::vector<double> p1_knots;
    for (const Row& row : rows) {
        phi_knots.push_back(row.phi);
        p1_knots.push_back(row.p1);
    }
    std::sort(phi_knots.begin(), phi_knots.end());
    phi_knots.erase(std::unique(phi_knots.begin(), phi_knots.end()), phi_knots.end());
    std::sort(p1_knots.begin(), p1_knots.end());
    p1_knots.erase(std::unique(p1_knots.begin(), p1_knots.end()), p1_knots.end());

    const std::size_t np = phi_knots.size();
    const std::size_t nq = p1_knots.size();
    std::vector<double> p2_values(np * nq, 0.0);
    std::vector<double> k_values(np * nq, 0.0);
    std::vector<char> seen(np * nq, 0);
    for (const Row& row : rows) {
        const auto pi = std::lower_bound(phi_knots.begin(), phi_knots.end(), row.phi);
        const auto qi = std::lower_bound(p1_knots.begin(), p1_knots.end(), row.p1);
        const std::size_t i = static_cast<std::size_t>(pi - phi_knots.begin());
        const std::size_t j = static_cast<std::size_t>(qi - p1_knots.begin());
        const std::size_t idx = i * nq + j;
        if (seen[idx]) {
            std::ostringstream oss;
            oss << source_name << ": line " << row.line << ": duplicate cell "
                << format_cell(row.phi, row.p1);
            raise(ErrorCode::ValidationError, oss.str());
        }
        seen[idx] = 1;
        p2_values[idx] = row.p2;
        k_values[idx] = row.k;
    }
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = 0; j < nq; ++j) {
            if (!seen[i * nq + j]) {
                raise(ErrorCode::ValidationError,
                      source_name + ": missing cell " +
                          format_cell(phi_knots[i], p1_knots[j]));
            }
        }
    }

    CalibrationGrid grid;
    grid.phi_knots_ = std::move(phi_knots);
    grid.p1_knots_ = std::move(p1_knots);
    grid.p2_values_ = std::move(p2_values);
    grid.k_values_ = std::move(k_values);
    grid.validate(source_name);
    return grid;
}

CalibrationGrid CalibrationGrid::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::ValidationError, "cannot open calibration file '" + path + "'");
    }
    return from_csv(in, path);
}

const CalibrationGrid& CalibrationGrid::table1() {
    static const CalibrationGrid grid = from_values(
        {0.4, 0.6, 0.8, 1.0}, {0.50, 0.75, 1.00, 1.25},
        {1.86, 1.90, 1.96, 2.09,  //
         2.11, 2.17, 2.24, 2.39,  //
         2.36, 2.42, 2.52, 2.67,  //
         2.60, 2.68, 2.80, 2.98},
        {0.63, 0.81, 1.11, 1.32,  //
         0.71, 0.85, 1.40, 1.71,  //
         0.86, 1.42, 1.90, 2.18,  //
         1.56, 1.98, 2.33, 2.58});
    return grid;
}

double CalibrationGrid::interpolate(const std::vector<double>& values, double phi,
                                    double p1) const {
    if (!(phi >= phi_min() && phi <= phi_max())) {
        std::ostringstream oss;
        oss << "phi=" << phi << " outside calibrated range "
            << format_band(phi_min(), phi_max()) << " rad";
        raise(ErrorCode::OutOfHull, oss.str());
    }
    if (!(p1 >= p1_min() && p1 <= p1_max())) {
        std::ostringstream oss;
        oss << "p1=" << p1 << " outside calibrated range "
            << format_band(p1_min(), p1_max()) << " bar";
        raise(ErrorCode::OutOfHull, oss.str());
    }
    const AxisPosition a = locate(phi_knots_, phi);
    const AxisPosition b = locate(p1_knots_, p1);
    const std::size_t nq = p1_knots_.size();
    const double v00 = values[a.cell * nq + b.cell];
    const double v01 = values[a.cell * nq + b.cell + 1];
    const double v10 = values[(a.cell + 1) * nq + b.cell];
    const double v11 = values[(a.cell + 1) * nq + b.cell + 1];
    const double u = a.t;
    const double v = b.t;
    return (1.0 - u) * (1.0 - v) * v00 + (1.0 - u) * v * v01 + u * (1.0 - v) * v10 +
           u * v * v11;
}

double CalibrationGrid::command_from_target(double phi, double p1) const {
    return interpolate(p2_values_, phi, p1);
}

double CalibrationGrid::stiffness_from_target(double phi, double p1) const {
    return interpolate(k_values_, phi, p1);
}

std::pair<double, double> CalibrationGrid::p2_band(double p1) const {
    return {command_from_target(phi_min(), p1), command_from_target(phi_max(), p1)};
}

std::pair<double, double> CalibrationGrid::stiffness_band(double phi) const {
    return {stiffness_from_target(phi, p1_min()), stiffness_from_target(phi, p1_max())};
}

double CalibrationGrid::shape_from_pressures(double p1, double p2) const {
    const auto [p2_lo, p2_hi] = p2_band(p1);
    if (!(p2 >= p2_lo - kHullGrace && p2 <= p2_hi + kHullGrace)) {
        std::ostringstream oss;
        oss << "p2=" << p2 << " outside achievable band " << format_band(p2_lo, p2_hi)
            << " bar at p1=" << p1;
        raise(ErrorCode::OutOfHull, oss.str());
    }
    const double target = std::clamp(p2, p2_lo, p2_hi);
    return bisect_increasing(
        [&](double phi) { return command_from_target(phi, p1) - target; }, phi_min(),
        phi_max());
}

PressureCommand CalibrationGrid::inverse_command(double phi, double k) const {
    const auto [k_lo, k_hi] = stiffness_band(phi);
    if (!(k >= k_lo - kHullGrace && k <= k_hi + kHullGrace)) {
        std::ostringstream oss;
        oss << "stiffness " << k << " Nm/rad outside achievable band "
            << format_band(k_lo, k_hi) << " at phi=" << phi;
        raise(ErrorCode::OutOfHull, oss.str());
    }
    const double target = std::clamp(k, k_lo, k_hi);
    const double p1 = bisect_increasing(
        [&](double p) { return stiffness_from_target(phi, p) - target; }, p1_min(),
        p1_max());
    return {p1, command_from_target(phi, p1)};
}

std::vector<PressureCommand> CalibrationGrid::iso_phi_curve(
    double phi, const std::vector<double>& p1_samples) const {
    std::vector<PressureCommand> out;
    out.reserve(p1_samples.size());
    for (double p1 : p1_samples) {
        out.push_back({p1, command_from_target(phi, p1)});
    }
    return out;
}

double CalibrationGrid::clamp_phi(double phi) const {
    return std::clamp(phi, phi_min(), phi_max());
}

double CalibrationGrid::clamp_p1(double p1) const {
    return std::clamp(p1, p1_min(), p1_max());
}

double CalibrationGrid::clamp_p2(double p1, double p2) const {
    const auto [lo, hi] = p2_band(p1);
    return std::clamp(p2, lo, hi);
}

double CalibrationGrid::clamp_stiffness(double phi, double k) const {
    const auto [lo, hi] = stiffness_band(phi);
    return std::clamp(k, lo, hi);
}

void CalibrationGrid::to_csv(std::ostream& out) const {
    out << kCsvHeader << "\n";
    const std::size_t nq = p1_knots_.size();
    for (std::size_t i = 0; i < phi_knots_.size(); ++i) {
        for (std::size_t j = 0; j < nq; ++j) {
            out << format_number(phi_knots_[i]) << "," << format_number(p1_knots_[j])
                << "," << format_number(p2_values_[i * nq + j]) << ","
                << format_number(k_values_[i * nq + j]) << "\n";
        }
    }
}

std::string CalibrationGrid::to_csv_string() const {
    std::ostringstream oss;
    to_csv(oss);
    return oss.str();
}

double linear_pressure_coefficient(const FingerParams& params) {
    params.validate();
    // 50% extension at 7 bar, linear in pressure.
    return 0.5 * params.arc_length / 7.0;
}

CalibrationGrid synthetic_grid(const FingerParams& params,
                               std::vector<double> phi_knots,
                               std::vector<double> p1_knots,
                               double stiffness_per_bar) {
    params.validate();
    if (!(stiffness_per_bar > 0.0)) {
        raise(ErrorCode::InvalidParams, "stiffness_per_bar must be positive");
    }
    const double c = linear_pressure_coefficient(params);
    const std::size_t np = phi_knots.size();
    const std::size_t nq = p1_knots.size();
    std::vector<double> p2_values(np * nq, 0.0);
    std::vector<double> k_values(np * nq, 0.0);
    for (std::size_t i = 0; i < np; ++i) {
        // Invert l2 = c*P2 through phi = 2*l2/r.
        const double p2 = params.actuator_radius * phi_knots[i] / (2.0 * c);
        for (std::size_t j = 0; j < nq; ++j) {
            p2_values[i * nq + j] = p2;
            k_values[i * nq + j] = stiffness_per_bar * (p1_knots[j] + 2.0 * p2);
        }
    }
    return CalibrationGrid::from_values(std::move(phi_knots), std::move(p1_knots),
                                        std::move(p2_values), std::move(k_values));
}

} // namespace softgrip
