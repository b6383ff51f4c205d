#include "photonic/components.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "photonic/units.hpp"

namespace photonic::components {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::domain_error(std::string(name) + " must be finite");
}

}  // namespace

void RingParams::validate() const {
    require_finite(lambda0_nm, "lambda0_nm");
    require_finite(w_int_nm, "w_int_nm");
    require_finite(w_c_nm, "w_c_nm");
    require_finite(T0, "T0");
    require_finite(F_c, "F_c");
    require_finite(lambda_fp_nm, "lambda_fp_nm");
    require_finite(fsr_fp_nm, "fsr_fp_nm");
    if (lambda0_nm <= 0.0) throw std::domain_error("lambda0_nm must be positive");
    if (w_int_nm <= 0.0) throw std::domain_error("w_int_nm must be positive");
    if (w_c_nm <= 0.0) throw std::domain_error("w_c_nm must be positive");
    if (T0 <= 0.0) throw std::domain_error("T0 must be positive");
    if (F_c < 0.0) throw std::domain_error("F_c must be non-negative");
    if (fsr_fp_nm <= 0.0) throw std::domain_error("fsr_fp_nm must be positive");
}

void RingGeometry::validate() const {
    require_finite(radius_um, "radius_um");
    require_finite(fsr_nm, "fsr_nm");
    if (radius_um <= 0.0) throw std::domain_error("radius_um must be positive");
    if (fsr_nm <= 0.0) throw std::domain_error("fsr_nm must be positive");
}

double ring_transmission(double lambda_nm, const RingParams& p) {
    p.validate();
    require_finite(lambda_nm, "lambda_nm");
    const double s = std::sin(kPi * (lambda_nm - p.lambda_fp_nm) / p.fsr_fp_nm);
    const double background = p.T0 / (1.0 + p.F_c * s * s);
    const double half_sum = 0.5 * (p.w_c_nm + p.w_int_nm);
    const double detune = lambda_nm - p.lambda0_nm;
    const double dip = p.w_c_nm * p.w_int_nm / (half_sum * half_sum + detune * detune);
    return background * (1.0 - dip);
}

double group_index(const RingGeometry& g, double lambda_nm) {
    g.validate();
    require_finite(lambda_nm, "lambda_nm");
    if (lambda_nm <= 0.0) throw std::domain_error("lambda_nm must be positive");
    const double radius_nm = g.radius_um * units::nm_per_um;
    return lambda_nm * lambda_nm / (2.0 * kPi * radius_nm * g.fsr_nm);
}

double intrinsic_q(double lambda0_nm, double w_int_nm) {
    require_finite(lambda0_nm, "lambda0_nm");
    require_finite(w_int_nm, "w_int_nm");
    if (lambda0_nm <= 0.0) throw std::domain_error("lambda0_nm must be positive");
    if (w_int_nm <= 0.0) throw std::domain_error("w_int_nm must be positive");
    return lambda0_nm / w_int_nm;
}

PropagationLoss propagation_loss(double n_g, double q_int, double lambda_nm) {
    require_finite(n_g, "n_g");
    require_finite(q_int, "q_int");
    require_finite(lambda_nm, "lambda_nm");
    if (n_g <= 0.0) throw std::domain_error("n_g must be positive");
    if (q_int <= 0.0) throw std::domain_error("q_int must be positive");
    if (lambda_nm <= 0.0) throw std::domain_error("lambda_nm must be positive");
    const double lambda_cm = lambda_nm / units::nm_per_cm;
    PropagationLoss out;
    out.alpha_per_cm = 2.0 * kPi * n_g / (q_int * lambda_cm);
    out.alpha_db_per_cm = units::db_per_cm_from_alpha(out.alpha_per_cm);
    return out;
}

void CouplerModel::validate() const {
    require_finite(ell_c_um, "ell_c_um");
    require_finite(ell_0_um, "ell_0_um");
    require_finite(dell_c_dlambda, "dell_c_dlambda");
    require_finite(dell_0_dlambda, "dell_0_dlambda");
    if (ell_c_um <= 0.0) throw std::domain_error("ell_c_um must be positive");
}

bool CouplerModel::has_expected_dispersion_signs() const {
    return dell_c_dlambda <= 0.0 && dell_0_dlambda >= 0.0;
}

double cross_power(double l_int_um, const CouplerModel& m) {
    m.validate();
    require_finite(l_int_um, "l_int_um");
    if (l_int_um < 0.0) throw std::domain_error("l_int_um must be non-negative");
    const double s = std::sin(0.5 * kPi * (l_int_um + m.ell_0_um) / m.ell_c_um);
    return s * s;
}

DesignLength design_length(double c_target, int k, Branch branch, const CouplerModel& m) {
    m.validate();
    require_finite(c_target, "c_target");
    if (c_target < 0.0 || c_target > 1.0) throw std::domain_error("c_target must lie in [0, 1]");
    if (k < 0) throw std::domain_error("k must be non-negative");
    const double theta = std::acos(1.0 - 2.0 * c_target);  // in [0, pi]
    const double sign = (branch == Branch::plus) ? 1.0 : -1.0;
    DesignLength out;
    out.l_int_um = m.ell_c_um * (2.0 * k + sign * theta / kPi) - m.ell_0_um;
    out.valid = out.l_int_um >= 0.0;
    return out;
}

double splitting_dispersion(double c, int k, Branch branch, const CouplerModel& m) {
    m.validate();
    require_finite(c, "c");
    if (c < 0.0 || c > 1.0) throw std::domain_error("c must lie in [0, 1]");
    if (k < 0) throw std::domain_error("k must be non-negative");
    const double theta = std::acos(1.0 - 2.0 * c);
    const double sign = (branch == Branch::plus) ? 1.0 : -1.0;
    // Signed derivative of C(lambda) along the fixed-length design point;
    // the chain rule pulls the sign of the branch through both terms.
    const double root = std::sqrt(std::max(c * (1.0 - c), 0.0));
    const double value = sign * (1.0 / m.ell_c_um) * root *
                         (kPi * m.dell_0_dlambda - (2.0 * kPi * k + sign * theta) * m.dell_c_dlambda);
    return std::abs(value);
}

double cross_power_sensitivity(double l_int_um, const CouplerModel& m) {
    m.validate();
    require_finite(l_int_um, "l_int_um");
    if (l_int_um < 0.0) throw std::domain_error("l_int_um must be non-negative");
    const double arg = 0.5 * kPi * (l_int_um + m.ell_0_um) / m.ell_c_um;
    // d/d(ell_c) sin^2(arg) with arg proportional to 1/ell_c.
    return -2.0 * std::sin(arg) * std::cos(arg) * arg / m.ell_c_um;
}

CouplerModel default_coupler_model() {
    return CouplerModel{
        .ell_c_um = 33.7,
        .ell_0_um = 8.2,
        .dell_c_dlambda = -0.086,
        .dell_0_dlambda = 0.004,
    };
}

CouplerDispersionTable::CouplerDispersionTable(std::vector<CouplerDispersionSample> samples)
    : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw std::invalid_argument("dispersion table needs at least two samples");
    for (const auto& s : samples_) {
        require_finite(s.lambda_nm, "lambda_nm");
        require_finite(s.ell_c_um, "ell_c_um");
        require_finite(s.ell_0_um, "ell_0_um");
        if (s.ell_c_um <= 0.0) throw std::domain_error("ell_c_um must be positive");
    }
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        if (samples_[i].lambda_nm <= samples_[i - 1].lambda_nm) {
            throw std::invalid_argument("dispersion table wavelengths must be strictly increasing");
        }
    }
}

CouplerModel CouplerDispersionTable::at(double lambda_nm) const {
    require_finite(lambda_nm, "lambda_nm");
    // Clamp to the covered band; outside it the nearest segment extrapolates.
    std::size_t hi = 1;
    while (hi + 1 < samples_.size() && samples_[hi].lambda_nm < lambda_nm) ++hi;
    const auto& a = samples_[hi - 1];
    const auto& b = samples_[hi];
    const double span = b.lambda_nm - a.lambda_nm;
    const double f = (lambda_nm - a.lambda_nm) / span;
    CouplerModel m;
    m.ell_c_um = a.ell_c_um + f * (b.ell_c_um - a.ell_c_um);
    m.ell_0_um = a.ell_0_um + f * (b.ell_0_um - a.ell_0_um);
    m.dell_c_dlambda = (b.ell_c_um - a.ell_c_um) / span;
    m.dell_0_dlambda = (b.ell_0_um - a.ell_0_um) / span;
    m.validate();
    return m;
}

CouplerDispersionTable default_dispersion_table() {
    const CouplerModel m = default_coupler_model();
    const double lambda_ref = 1554.0;
    std::vector<CouplerDispersionSample> samples;
    for (double lambda : {1548.0, 1551.0, 1554.0, 1557.0, 1560.0, 1562.0}) {
        samples.push_back(CouplerDispersionSample{
            .lambda_nm = lambda,
            .ell_c_um = m.ell_c_um + m.dell_c_dlambda * (lambda - lambda_ref),
            .ell_0_um = m.ell_0_um + m.dell_0_dlambda * (lambda - lambda_ref),
        });
    }
    return CouplerDispersionTable(std::move(samples));
}

const SensitivityEntry& SensitivityLedger::find(std::string_view parameter) const {
    for (const auto& e : entries) {
        if (e.parameter == parameter) return e;
    }
    throw std::out_of_range("unknown sensitivity parameter: " + std::string(parameter));
}

SensitivityLedger builtin_sensitivity_ledger() {
    SensitivityLedger ledger;
    ledger.nominal_ellc_um = 37.47;
    ledger.entries = {
        {"width_left_waveguide", "1000", "nm", "-25", -1.15},
        {"width_right_waveguide", "1000", "nm", "-25", -1.15},
        {"slot_width", "400", "nm", "+25", 3.29},
        {"lateral_etch", "-", "nm", "+25", 1.85},
        {"sin_thickness", "330", "nm", "-10", -1.46},
        {"remaining_thickness", "50", "nm", "-10", -0.62},
        {"center_thickness", "70", "nm", "-10", 2.06},
        {"ref_index_sin", "2.00", "-", "+0.01", 1.07},
        {"ref_index_sio2", "1.44", "-", "+0.01", -0.33},
        {"sidewall_angle", "17", "deg", "+1", -0.26},
        {"wavelength", "1550", "nm", "+5", -0.59},
    };
    return ledger;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

SensitivityLedger load_sensitivity_ledger(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open sensitivity ledger: " + csv_path.string());
    SensitivityLedger ledger;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (stripped.front() == '#') {
            // Metadata comment of the form "# ell_c_um = <value>".
            const auto eq = stripped.find('=');
            if (eq != std::string::npos && stripped.find("ell_c_um") != std::string::npos) {
                ledger.nominal_ellc_um = std::stod(trim(stripped.substr(eq + 1)));
            }
            continue;
        }
        if (!header_seen) {
            if (stripped != "parameter,nominal,unit,variation,delta_ellc_um") {
                throw std::runtime_error("unexpected sensitivity ledger header: " + stripped);
            }
            header_seen = true;
            continue;
        }
        auto fields = split_csv_line(stripped);
        if (fields.size() != 5) {
            throw std::runtime_error("sensitivity ledger row needs 5 fields: " + stripped);
        }
        SensitivityEntry e;
        e.parameter = trim(fields[0]);
        e.nominal = trim(fields[1]);
        e.unit = trim(fields[2]);
        e.variation = trim(fields[3]);
        e.delta_ellc_um = std::stod(trim(fields[4]));
        ledger.entries.push_back(std::move(e));
    }
    if (!header_seen) throw std::runtime_error("sensitivity ledger has no header row");
    return ledger;
}

void save_sensitivity_ledger(const SensitivityLedger& ledger, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write sensitivity ledger: " + csv_path.string());
    out << "# ell_c_um = " << ledger.nominal_ellc_um << "\n";
    out << "parameter,nominal,unit,variation,delta_ellc_um\n";
    for (const auto& e : ledger.entries) {
        out << e.parameter << ',' << e.nominal << ',' << e.unit << ',' << e.variation << ','
            << e.delta_ellc_um << "\n";
    }
}

namespace {

SensitivityCombination combine(const std::vector<std::pair<std::string, double>>& perturbations,
                               const SensitivityLedger& ledger) {
    SensitivityCombination out;
    for (const auto& [name, multiplier] : perturbations) {
        out.delta_ellc_um += multiplier * ledger.find(name).delta_ellc_um;
    }
    return out;
}

}  // namespace

SensitivityCombination sensitivity_combination(
    const std::vector<std::pair<std::string, double>>& perturbations, const SensitivityLedger& ledger) {
    return combine(perturbations, ledger);
}

SensitivityCombination sensitivity_combination(
    const std::vector<std::pair<std::string, double>>& perturbations, const SensitivityLedger& ledger,
    double l_int_um, const CouplerModel& m) {
    SensitivityCombination out = combine(perturbations, ledger);
    out.delta_c = out.delta_ellc_um * cross_power_sensitivity(l_int_um, m);
    return out;
}

}  // namespace photonic::components
