#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Dense>

#include "photonic/calib.hpp"
#include "photonic/insertion.hpp"
#include "photonic/units.hpp"

namespace photonic::calib {

namespace {

/// Chebyshev basis values T_0..T_order at the normalized position of
/// lambda inside [lo, hi]; positions outside are clamped to the edge.
std::vector<double> chebyshev_basis(double lambda_nm, double lo, double hi, int order) {
    double u = 2.0 * (lambda_nm - lo) / (hi - lo) - 1.0;
    u = std::clamp(u, -1.0, 1.0);
    std::vector<double> t(order + 1);
    t[0] = 1.0;
    if (order >= 1) t[1] = u;
    for (int k = 2; k <= order; ++k) t[k] = 2.0 * u * t[k - 1] - t[k - 2];
    return t;
}

double eval_chebyshev(const std::vector<double>& coeffs, double lambda_nm, double lo, double hi) {
    const std::vector<double> t = chebyshev_basis(lambda_nm, lo, hi, static_cast<int>(coeffs.size()) - 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) sum += coeffs[k] * t[k];
    return sum;
}

InsertionStats stats_of(std::vector<double> values) {
    InsertionStats s;
    const std::size_t n = values.size();
    if (n == 0) return s;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    s.mean_db = mean;
    s.stddev_db = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    std::sort(values.begin(), values.end());
    const auto quantile = [&values, n](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double f = pos - static_cast<double>(lo);
        return values[lo] + f * (values[hi] - values[lo]);
    };
    s.q1_db = quantile(0.25);
    s.median_db = quantile(0.5);
    s.q3_db = quantile(0.75);
    return s;
}

}  // namespace

double CalibrationSolution::t1_db(double lambda_nm) const {
    return eval_chebyshev(t1_coeffs, lambda_nm, lambda_min_nm, lambda_max_nm);
}
double CalibrationSolution::t3_db(double lambda_nm) const {
    return eval_chebyshev(t3_coeffs, lambda_nm, lambda_min_nm, lambda_max_nm);
}
double CalibrationSolution::t4_db(double lambda_nm) const {
    return eval_chebyshev(t4_coeffs, lambda_nm, lambda_min_nm, lambda_max_nm);
}
double CalibrationSolution::y_db(double lambda_nm) const {
    return eval_chebyshev(y_coeffs, lambda_nm, lambda_min_nm, lambda_max_nm);
}

void CalibrationSolution::validate() const {
    if (order < 0) throw std::domain_error("polynomial order must be non-negative");
    if (!(lambda_max_nm > lambda_min_nm)) throw std::domain_error("wavelength range must be increasing");
    const std::size_t want = static_cast<std::size_t>(order) + 1;
    if (t1_coeffs.size() != want || t3_coeffs.size() != want || t4_coeffs.size() != want ||
        y_coeffs.size() != want) {
        throw std::domain_error("coefficient count must be order + 1 for each function");
    }
    for (int i = 0; i <= 32; ++i) {
        const double lambda = lambda_min_nm + (lambda_max_nm - lambda_min_nm) * i / 32.0;
        if (!std::isfinite(t1_db(lambda)) || !std::isfinite(t3_db(lambda)) ||
            !std::isfinite(t4_db(lambda)) || !std::isfinite(y_db(lambda))) {
            throw std::domain_error("calibration solution evaluates non-finite");
        }
    }
}

InsertionReport calibrate_insertion(const InsertionInput& input, const InsertionOptions& options) {
    if (options.poly_order < 0) throw std::domain_error("polynomial order must be non-negative");
    bool have_type1 = false;
    bool have_type2 = false;
    bool have_type3 = false;
    for (const auto& run : input.calibration) {
        switch (run.device_type) {
            case 1:
                have_type1 = true;
                break;
            case 2:
                if (!run.through) throw std::invalid_argument("type-2 run lacks a through sweep");
                have_type2 = true;
                break;
            case 3:
                if (!run.cross) throw std::invalid_argument("type-3 run lacks a cross sweep");
                have_type3 = true;
                break;
            default:
                throw std::invalid_argument("calibration device type must be 1, 2, or 3");
        }
    }
    if (!have_type1) {
        throw NonIdentifiableError(
            "reference transmission and splitter factor only appear as a product: add a type-1 run");
    }
    if (!have_type2) throw NonIdentifiableError("through-port transmission unresolved: add a type-2 run");
    if (!have_type3) throw NonIdentifiableError("cross-port transmission unresolved: add a type-3 run");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<const SweepDataset*, std::array<bool, 4>>> rows_src;  // t1,t3,t4,y blocks
    for (const auto& run : input.calibration) {
        run.reference.validate();
        switch (run.device_type) {
            case 1:
                rows_src.push_back({&run.reference, {true, false, false, false}});
                break;
            case 2:
                run.through->validate();
                rows_src.push_back({&run.reference, {true, false, false, true}});
                rows_src.push_back({&*run.through, {false, true, false, true}});
                break;
            case 3:
                run.cross->validate();
                rows_src.push_back({&run.reference, {true, false, false, true}});
                rows_src.push_back({&*run.cross, {false, false, true, true}});
                break;
        }
    }
    for (const auto& [data, blocks] : rows_src) {
        lo = std::min(lo, data->min_wavelength());
        hi = std::max(hi, data->max_wavelength());
    }
    if (!(hi > lo)) throw std::domain_error("calibration sweeps span no wavelength range");

    const int order = options.poly_order;
    const std::size_t n_coef = static_cast<std::size_t>(order) + 1;
    const std::size_t n_unknowns = 4 * n_coef;
    std::size_t n_rows = 0;
    std::vector<std::pair<SweepDataset, std::array<bool, 4>>> rows_db;
    rows_db.reserve(rows_src.size());
    for (const auto& [data, blocks] : rows_src) {
        rows_db.emplace_back(data->to_db(), blocks);
        n_rows += data->samples.size();
    }
    if (n_rows < n_unknowns) {
        throw NonIdentifiableError("fewer calibration samples than polynomial coefficients");
    }

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_rows, n_unknowns);
    Eigen::VectorXd b(n_rows);
    std::size_t row = 0;
    for (const auto& [data, blocks] : rows_db) {
        for (const auto& s : data.samples) {
            const std::vector<double> basis = chebyshev_basis(s.wavelength_nm, lo, hi, order);
            for (std::size_t block = 0; block < 4; ++block) {
                if (!blocks[block]) continue;
                for (std::size_t k = 0; k < n_coef; ++k) a(row, block * n_coef + k) = basis[k];
            }
            b(row) = s.value;
            ++row;
        }
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < static_cast<Eigen::Index>(n_unknowns)) {
        throw NonIdentifiableError("calibration design matrix is rank-deficient");
    }
    const Eigen::VectorXd x = qr.solve(b);

    InsertionReport report;
    report.solution.order = order;
    report.solution.lambda_min_nm = lo;
    report.solution.lambda_max_nm = hi;
    const auto take = [&x, n_coef](std::size_t block) {
        std::vector<double> c(n_coef);
        for (std::size_t k = 0; k < n_coef; ++k) c[k] = x(block * n_coef + k);
        return c;
    };
    report.solution.t1_coeffs = take(0);
    report.solution.t3_coeffs = take(1);
    report.solution.t4_coeffs = take(2);
    report.solution.y_coeffs = take(3);
    report.solution.validate();
    report.calibration_rms_db = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(n_rows));

    std::vector<double> corrected;
    std::vector<double> uncorrected;
    for (const auto& dut : input.duts) {
        const SweepDataset ref = dut.reference.to_linear();
        const SweepDataset thru = dut.through.to_linear();
        const SweepDataset cross = dut.cross.to_linear();
        ref.validate();
        thru.validate();
        cross.validate();
        if (ref.samples.size() != thru.samples.size() || ref.samples.size() != cross.samples.size()) {
            throw std::invalid_argument("device sweeps must share one wavelength grid: " + dut.device_id);
        }
        double corrected_sum = 0.0;
        double uncorrected_sum = 0.0;
        for (std::size_t i = 0; i < ref.samples.size(); ++i) {
            const double lambda = ref.samples[i].wavelength_nm;
            if (std::abs(thru.samples[i].wavelength_nm - lambda) > 1e-9 ||
                std::abs(cross.samples[i].wavelength_nm - lambda) > 1e-9) {
                throw std::invalid_argument("device sweeps must share one wavelength grid: " +
                                            dut.device_id);
            }
            const double p_ref = ref.samples[i].value;
            const double p_t = thru.samples[i].value;
            const double p_c = cross.samples[i].value;
            if (!(p_ref > 0.0)) {
                throw std::domain_error("reference power must be positive: " + dut.device_id);
            }
            const double t1 = units::linear_from_db(report.solution.t1_db(lambda));
            const double t3 = units::linear_from_db(report.solution.t3_db(lambda));
            const double t4 = units::linear_from_db(report.solution.t4_db(lambda));
            const double ratio = (p_t / t3 + p_c / t4) / (p_ref / t1);
            const double raw = (p_t + p_c) / p_ref;
            if (!(ratio > 0.0) || !(raw > 0.0)) {
                throw std::domain_error("device transmits no power: " + dut.device_id);
            }
            corrected_sum += -units::db_from_linear(ratio);
            uncorrected_sum += -units::db_from_linear(raw);
        }
        const double n = static_cast<double>(ref.samples.size());
        report.devices.push_back(DeviceInsertion{
            .device_id = dut.device_id,
            .corrected_db = corrected_sum / n,
            .uncorrected_db = uncorrected_sum / n,
        });
        corrected.push_back(corrected_sum / n);
        uncorrected.push_back(uncorrected_sum / n);
    }
    report.corrected = stats_of(std::move(corrected));
    report.uncorrected = stats_of(std::move(uncorrected));
    return report;
}

namespace {

SweepDataset load_role(const nlohmann::json& entry, const std::string& role,
                       const std::filesystem::path& base_dir, const std::string& device_id,
                       TransmissionScale scale) {
    if (!entry.contains(role)) {
        throw std::runtime_error("manifest entry for " + device_id + " lacks the '" + role + "' file");
    }
    const std::filesystem::path p = base_dir / entry.at(role).get<std::string>();
    return load_sweep_csv(p, device_id, role, scale);
}

}  // namespace

InsertionInput load_insertion_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("manifest is not valid JSON: " + std::string(e.what()));
    }
    const std::filesystem::path base_dir = manifest_path.parent_path();
    TransmissionScale scale = TransmissionScale::linear;
    if (doc.contains("scale")) {
        const std::string s = doc.at("scale").get<std::string>();
        if (s == "linear") {
            scale = TransmissionScale::linear;
        } else if (s == "dB" || s == "db") {
            scale = TransmissionScale::dB;
        } else {
            throw std::runtime_error("manifest scale must be 'linear' or 'dB'");
        }
    }

    InsertionInput input;
    for (const auto& entry : doc.value("calibration", nlohmann::json::array())) {
        CalibrationRun run;
        run.device_id = entry.value("device", std::string{});
        run.device_type = entry.value("type", 0);
        run.reference = load_role(entry, "reference", base_dir, run.device_id, scale);
        if (run.device_type == 2) run.through = load_role(entry, "through", base_dir, run.device_id, scale);
        if (run.device_type == 3) run.cross = load_role(entry, "cross", base_dir, run.device_id, scale);
        input.calibration.push_back(std::move(run));
    }
    for (const auto& entry : doc.value("duts", nlohmann::json::array())) {
        DutRun run;
        run.device_id = entry.value("device", std::string{});
        run.reference = load_role(entry, "reference", base_dir, run.device_id, scale);
        run.through = load_role(entry, "through", base_dir, run.device_id, scale);
        run.cross = load_role(entry, "cross", base_dir, run.device_id, scale);
        input.duts.push_back(std::move(run));
    }
    return input;
}

namespace {

nlohmann::json stats_json(const InsertionStats& s) {
    return nlohmann::json{
        {"mean_db", s.mean_db},     {"stddev_db", s.stddev_db}, {"median_db", s.median_db},
        {"q1_db", s.q1_db},         {"q3_db", s.q3_db},
    };
}

}  // namespace

nlohmann::json to_json(const InsertionReport& report) {
    nlohmann::json devices = nlohmann::json::array();
    for (const auto& d : report.devices) {
        devices.push_back(nlohmann::json{
            {"device", d.device_id},
            {"corrected_db", d.corrected_db},
            {"uncorrected_db", d.uncorrected_db},
        });
    }
    return nlohmann::json{
        {"solution",
         {
             {"order", report.solution.order},
             {"lambda_min_nm", report.solution.lambda_min_nm},
             {"lambda_max_nm", report.solution.lambda_max_nm},
             {"t1_coeffs_db", report.solution.t1_coeffs},
             {"t3_coeffs_db", report.solution.t3_coeffs},
             {"t4_coeffs_db", report.solution.t4_coeffs},
             {"y_coeffs_db", report.solution.y_coeffs},
         }},
        {"calibration_rms_db", report.calibration_rms_db},
        {"devices", devices},
        {"corrected", stats_json(report.corrected)},
        {"uncorrected", stats_json(report.uncorrected)},
    };
}

}  // namespace photonic::calib
