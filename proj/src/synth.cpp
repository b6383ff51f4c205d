#include "photonic/synth.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "photonic/lincircuit.hpp"
#include "photonic/units.hpp"

namespace photonic::synth {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> wavelength_grid(double lo, double hi, double step) {
    if (!(step > 0.0)) throw std::domain_error("step_nm must be positive");
    if (!(hi > lo)) throw std::domain_error("wavelength range must be increasing");
    std::vector<double> grid;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
    grid.reserve(n);
    for (int i = 0; i < n; ++i) grid.push_back(lo + i * step);
    return grid;
}

}  // namespace

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on explicit uniforms; u1 shifted away from zero.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

calib::SweepDataset synth_ring(const RingSynthConfig& config) {
    config.params.validate();
    Rng rng(config.seed);
    calib::SweepDataset out;
    out.device_id = "synthetic_ring";
    out.port_id = "through";
    out.scale = calib::TransmissionScale::linear;
    for (double lambda : wavelength_grid(config.lambda_min_nm, config.lambda_max_nm, config.step_nm)) {
        const double t = components::ring_transmission(lambda, config.params);
        const double noisy = t * std::exp(config.noise_sigma * rng.normal());
        out.samples.push_back(calib::SweepSample{lambda, noisy});
    }
    out.validate();
    return out;
}

std::vector<calib::CouplerSweepPoint> synth_coupler_sweep(const CouplerSweepSynthConfig& config) {
    config.model.validate();
    if (config.n_points < 2) throw std::domain_error("need at least 2 sweep points");
    if (!(config.l_max_um > config.l_min_um)) throw std::domain_error("length range must be increasing");
    Rng rng(config.seed);
    std::vector<calib::CouplerSweepPoint> out;
    out.reserve(config.n_points);
    for (int i = 0; i < config.n_points; ++i) {
        const double l = config.l_min_um +
                         (config.l_max_um - config.l_min_um) * static_cast<double>(i) /
                             static_cast<double>(config.n_points - 1);
        const double c = components::cross_power(l, config.model);
        // Noise enters through the two port powers whose ratio defines C,
        // so the noisy value stays inside [0, 1] by construction.
        const double p_cross = c * std::exp(config.noise_sigma * rng.normal());
        const double p_bar = (1.0 - c) * std::exp(config.noise_sigma * rng.normal());
        const double denom = p_cross + p_bar;
        out.push_back(calib::CouplerSweepPoint{l, denom > 0.0 ? p_cross / denom : c});
    }
    return out;
}

void save_coupler_sweep_csv(const std::vector<calib::CouplerSweepPoint>& points,
                            const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write sweep points: " + csv_path.string());
    out.precision(12);
    out << "l_int_um,c\n";
    for (const auto& p : points) out << p.l_int_um << ',' << p.cross << "\n";
}

std::vector<calib::CouplerSweepPoint> load_coupler_sweep_csv(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open sweep points: " + csv_path.string());
    std::vector<calib::CouplerSweepPoint> out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "l_int_um,c") {
                throw std::runtime_error("unexpected sweep-point header: " + line);
            }
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b)) {
            throw std::runtime_error("malformed sweep-point row: " + line);
        }
        out.push_back(calib::CouplerSweepPoint{std::stod(a), std::stod(b)});
    }
    if (!header_seen) throw std::runtime_error("sweep-point file has no header: " + csv_path.string());
    return out;
}

MziPair synth_mzi_pair(const MziSynthConfig& config) {
    if (!(config.coupler_cross >= 0.0 && config.coupler_cross <= 1.0)) {
        throw std::domain_error("coupler_cross must lie in [0, 1]");
    }
    if (!(config.n_eff > 0.0) || !(config.delta_l_um > 0.0)) {
        throw std::domain_error("n_eff and delta_l_um must be positive");
    }
    Rng rng(config.seed);
    MziPair out;
    out.left.device_id = out.right.device_id = "synthetic_mzi";
    out.left.port_id = "left";
    out.right.port_id = "right";
    out.left.scale = out.right.scale = calib::TransmissionScale::linear;

    // Modes: 0 = left outer arm, 1 = left inner, 2 = right inner,
    // 3 = right outer. The device under test couples the two inner modes;
    // the outer arms carry the path-length phase.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (double lambda : wavelength_grid(config.lambda_min_nm, config.lambda_max_nm, config.step_nm)) {
        const double phi = 2.0 * kPi * config.n_eff * config.delta_l_um * units::nm_per_um / lambda;
        lincircuit::Netlist net;
        net.n_modes = 4;
        lincircuit::Stage input_stage;
        input_stage.push_back(lincircuit::CouplerSpec{0.5, 0, 1});
        if (config.kind == MziDeviceKind::symmetric_reference) {
            input_stage.push_back(lincircuit::CouplerSpec{0.5, 2, 3});
        }
        net.stages.push_back(std::move(input_stage));
        net.stages.push_back(lincircuit::Stage{
            lincircuit::PhaseShiftSpec{0, phi},
            lincircuit::PhaseShiftSpec{3, phi},
        });
        if (config.kind == MziDeviceKind::coupler_under_test) {
            net.stages.push_back(lincircuit::Stage{lincircuit::CouplerSpec{config.coupler_cross, 1, 2}});
        }
        net.stages.push_back(lincircuit::Stage{
            lincircuit::CouplerSpec{0.5, 0, 1},
            lincircuit::CouplerSpec{0.5, 2, 3},
        });
        const lincircuit::ComplexMatrix s = lincircuit::compile(net);
        const std::vector<std::complex<double>> in = {
            {inv_sqrt2, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {inv_sqrt2, 0.0}};
        const std::vector<std::complex<double>> field = s * in;
        const double p_left = std::norm(field[1]) * std::exp(config.noise_sigma * rng.normal());
        const double p_right = std::norm(field[2]) * std::exp(config.noise_sigma * rng.normal());
        out.left.samples.push_back(calib::SweepSample{lambda, p_left});
        out.right.samples.push_back(calib::SweepSample{lambda, p_right});
    }
    out.left.validate();
    out.right.validate();
    return out;
}

namespace {

/// Smooth synthetic port transmissions (dB) over the normalized position
/// u in [-1, 1]. The through and cross ports differ by a flat 1 dB; the
/// reference port sits exactly between them so the uncorrected insertion
/// loss of extreme-ratio couplers is biased by half that difference.
struct ChipTruth {
    double lo, hi;
    double u(double lambda) const { return 2.0 * (lambda - lo) / (hi - lo) - 1.0; }
    double t1_db(double lambda) const { const double x = u(lambda); return -4.0 - 0.5 * x - 0.3 * x * x; }
    double t3_db(double lambda) const { const double x = u(lambda); return -3.5 - 0.5 * x - 0.3 * x * x; }
    double t4_db(double lambda) const { const double x = u(lambda); return -4.5 - 0.5 * x - 0.3 * x * x; }
    double y_db(double lambda) const { const double x = u(lambda); return -0.8 - 0.05 * x + 0.05 * x * x; }
};

calib::SweepDataset make_sweep(const std::string& device, const std::string& port,
                               const std::vector<double>& grid,
                               const std::function<double(double)>& linear_value, double port_sigma,
                               double sample_sigma, Rng& rng) {
    calib::SweepDataset out;
    out.device_id = device;
    out.port_id = port;
    out.scale = calib::TransmissionScale::linear;
    const double port_factor = std::exp(port_sigma * rng.normal());
    for (double lambda : grid) {
        const double v = linear_value(lambda) * port_factor * std::exp(sample_sigma * rng.normal());
        out.samples.push_back(calib::SweepSample{lambda, v});
    }
    out.validate();
    return out;
}

}  // namespace

calib::InsertionInput synth_insertion_chip(const InsertionSynthConfig& config) {
    if (config.n_duts < 1) throw std::domain_error("need at least one device under test");
    const std::vector<double> grid =
        wavelength_grid(config.lambda_min_nm, config.lambda_max_nm, config.step_nm);
    const ChipTruth truth{config.lambda_min_nm, config.lambda_max_nm};
    Rng rng(config.seed);

    const auto lin = [](double db) { return units::linear_from_db(db); };
    calib::InsertionInput input;

    calib::CalibrationRun type1;
    type1.device_type = 1;
    type1.device_id = "cal_type1";
    type1.reference = make_sweep(type1.device_id, "reference", grid,
                                 [&](double l) { return lin(truth.t1_db(l)); }, config.port_sigma,
                                 config.sample_sigma, rng);
    input.calibration.push_back(std::move(type1));

    calib::CalibrationRun type2;
    type2.device_type = 2;
    type2.device_id = "cal_type2";
    type2.reference = make_sweep(type2.device_id, "reference", grid,
                                 [&](double l) { return lin(truth.y_db(l) + truth.t1_db(l)); },
                                 config.port_sigma, config.sample_sigma, rng);
    type2.through = make_sweep(type2.device_id, "through", grid,
                               [&](double l) { return lin(truth.y_db(l) + truth.t3_db(l)); },
                               config.port_sigma, config.sample_sigma, rng);
    input.calibration.push_back(std::move(type2));

    calib::CalibrationRun type3;
    type3.device_type = 3;
    type3.device_id = "cal_type3";
    type3.reference = make_sweep(type3.device_id, "reference", grid,
                                 [&](double l) { return lin(truth.y_db(l) + truth.t1_db(l)); },
                                 config.port_sigma, config.sample_sigma, rng);
    type3.cross = make_sweep(type3.device_id, "cross", grid,
                             [&](double l) { return lin(truth.y_db(l) + truth.t4_db(l)); },
                             config.port_sigma, config.sample_sigma, rng);
    input.calibration.push_back(std::move(type3));

    const components::CouplerModel coupler = components::default_coupler_model();
    const double loss_factor = units::linear_from_db(-config.true_loss_db);
    for (int d = 0; d < config.n_duts; ++d) {
        const double l_int =
            2.0 + 46.0 * static_cast<double>(d) / static_cast<double>(std::max(config.n_duts - 1, 1));
        const double c = components::cross_power(l_int, coupler);
        std::ostringstream name;
        name << "dut";
        name.width(2);
        name.fill('0');
        name << d;
        calib::DutRun run;
        run.device_id = name.str();
        run.reference = make_sweep(run.device_id, "reference", grid,
                                   [&](double l) { return lin(truth.y_db(l) + truth.t1_db(l)); },
                                   config.port_sigma, config.sample_sigma, rng);
        run.through = make_sweep(
            run.device_id, "through", grid,
            [&](double l) { return lin(truth.y_db(l) + truth.t3_db(l)) * (1.0 - c) * loss_factor; },
            config.port_sigma, config.sample_sigma, rng);
        run.cross = make_sweep(
            run.device_id, "cross", grid,
            [&](double l) { return lin(truth.y_db(l) + truth.t4_db(l)) * c * loss_factor; },
            config.port_sigma, config.sample_sigma, rng);
        input.duts.push_back(std::move(run));
    }
    return input;
}

void write_insertion_chip(const calib::InsertionInput& input, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["scale"] = "linear";
    manifest["calibration"] = nlohmann::json::array();
    manifest["duts"] = nlohmann::json::array();
    const auto write_one = [&dir](const calib::SweepDataset& data, const std::string& device,
                                  const std::string& role) {
        const std::string name = device + "_" + role + ".csv";
        calib::save_sweep_csv(data, dir / name);
        return name;
    };
    for (const auto& run : input.calibration) {
        nlohmann::json entry;
        entry["device"] = run.device_id;
        entry["type"] = run.device_type;
        entry["reference"] = write_one(run.reference, run.device_id, "reference");
        if (run.through) entry["through"] = write_one(*run.through, run.device_id, "through");
        if (run.cross) entry["cross"] = write_one(*run.cross, run.device_id, "cross");
        manifest["calibration"].push_back(std::move(entry));
    }
    for (const auto& run : input.duts) {
        nlohmann::json entry;
        entry["device"] = run.device_id;
        entry["reference"] = write_one(run.reference, run.device_id, "reference");
        entry["through"] = write_one(run.through, run.device_id, "through");
        entry["cross"] = write_one(run.cross, run.device_id, "cross");
        manifest["duts"].push_back(std::move(entry));
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
}

calib::TransmissionMatrix synth_cnot_matrix(const CnotMatrixSynthConfig& config) {
    calib::TransmissionMatrix m = calib::cnot_transmission_model(config.c_half, config.c_twothirds);
    Rng rng(config.seed);
    // Gaussian with mean absolute value noise_mean_abs has sigma
    // noise_mean_abs * sqrt(pi/2).
    const double sigma = config.noise_mean_abs * std::sqrt(kPi / 2.0);
    for (auto& row : m) {
        for (double& v : row) {
            v = std::clamp(v + sigma * rng.normal(), 0.0, 1.0);
        }
    }
    return m;
}

void save_matrix_csv(const calib::TransmissionMatrix& m, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write matrix: " + csv_path.string());
    out.precision(12);
    for (const auto& row : m) {
        for (std::size_t j = 0; j < row.size(); ++j) out << row[j] << (j + 1 < row.size() ? "," : "\n");
    }
}

calib::TransmissionMatrix load_matrix_csv(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open matrix: " + csv_path.string());
    calib::TransmissionMatrix m{};
    std::string line;
    std::size_t r = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (r >= 4) throw std::runtime_error("matrix file has more than 4 rows: " + csv_path.string());
        std::stringstream ss(line);
        std::string field;
        std::size_t c = 0;
        while (std::getline(ss, field, ',')) {
            if (c >= 4) throw std::runtime_error("matrix row has more than 4 values: " + line);
            m[r][c++] = std::stod(field);
        }
        if (c != 4) throw std::runtime_error("matrix row needs 4 values: " + line);
        ++r;
    }
    if (r != 4) throw std::runtime_error("matrix file needs 4 rows: " + csv_path.string());
    return m;
}

}  // namespace photonic::synth
