#include "photonic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "photonic/calib.hpp"
#include "photonic/components.hpp"
#include "photonic/insertion.hpp"
#include "photonic/lincircuit.hpp"
#include "photonic/quantum.hpp"
#include "photonic/synth.hpp"
#include "photonic/units.hpp"

namespace photonic::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pulls --config out of the arguments, loads the JSON object, and splices
/// its entries in as --key=value right after the subcommand tokens so
/// explicitly passed flags, which come later, win under TakeLast.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::optional<std::string> config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!config_path) return rest;

    std::ifstream in(*config_path);
    if (!in) throw UsageError("cannot open config file: " + *config_path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");

    std::size_t insert_at = 0;
    while (insert_at < rest.size() && insert_at < 2 && rest[insert_at].rfind("-", 0) != 0) {
        ++insert_at;
    }
    if (insert_at == 0) throw UsageError("--config requires a subcommand");

    std::vector<std::string> merged(rest.begin(), rest.begin() + insert_at);
    for (const auto& [key, value] : doc.items()) {
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_boolean()) {
            text = value.get<bool>() ? "true" : "false";
        } else if (value.is_number()) {
            text = value.dump();
        } else {
            throw UsageError("config value for '" + key + "' must be a string, number, or boolean");
        }
        merged.push_back("--" + key + "=" + text);
    }
    merged.insert(merged.end(), rest.begin() + insert_at, rest.end());
    return merged;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

/// Results go to stdout; --output mirrors them into a file.
void emit_json(const json& doc, const std::string& output_path) {
    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!output_path.empty()) write_text(output_path, text);
}

calib::TransmissionScale parse_scale(const std::string& scale) {
    if (scale == "linear") return calib::TransmissionScale::linear;
    if (scale == "db" || scale == "dB") return calib::TransmissionScale::dB;
    throw UsageError("scale must be 'linear' or 'db'");
}

json model_json(const components::CouplerModel& m) {
    return json{
        {"ell_c_um", m.ell_c_um},
        {"ell_0_um", m.ell_0_um},
        {"dell_c_dlambda_um_per_nm", m.dell_c_dlambda},
        {"dell_0_dlambda_um_per_nm", m.dell_0_dlambda},
    };
}

json fringe_json(const calib::MziFringeFit& f) {
    return json{
        {"period_nm", f.period_nm},
        {"lambda_max_left_nm", f.lambda_max_left_nm},
        {"lambda_max_right_nm", f.lambda_max_right_nm},
        {"offset_left", f.offset_left},
        {"amplitude_left", f.amplitude_left},
        {"offset_right", f.offset_right},
        {"amplitude_right", f.amplitude_right},
    };
}

json matrix_json(const calib::TransmissionMatrix& m) {
    json rows = json::array();
    for (const auto& row : m) rows.push_back(std::vector<double>(row.begin(), row.end()));
    return rows;
}

json report_json(const quantum::GateReport& r) {
    json conditional = json::array();
    for (const auto& row : r.conditional) {
        conditional.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return json{
        {"c_half", r.c_half},
        {"c_twothirds", r.c_twothirds},
        {"fidelity", r.fidelity},
        {"success_prob", r.success_prob},
        {"input_labels", {"00", "01", "10", "11"}},
        {"input_success", std::vector<double>(r.input_success.begin(), r.input_success.end())},
        {"conditional", conditional},
    };
}

struct CommandContext {
    // One slot per subcommand; the chosen one runs after parsing.
    std::function<void()> action;
};

void add_design_coupler(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("design-coupler",
                                   "Interaction lengths realizing a target splitting ratio");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto c_target = std::make_shared<double>(0.5);
    auto k_max = std::make_shared<int>(2);
    auto model = std::make_shared<components::CouplerModel>(components::default_coupler_model());
    auto output = std::make_shared<std::string>();
    cmd->add_option("--c-target", *c_target, "Target splitting ratio in (0, 1)")->required();
    cmd->add_option("--k-max", *k_max, "Largest period index to consider");
    cmd->add_option("--ell-c", model->ell_c_um, "Coupling length (um)");
    cmd->add_option("--ell-0", model->ell_0_um, "Offset length (um)");
    cmd->add_option("--dell-c", model->dell_c_dlambda, "d ell_c / d lambda (um/nm)");
    cmd->add_option("--dell-0", model->dell_0_dlambda, "d ell_0 / d lambda (um/nm)");
    cmd->add_option("--output", *output, "Also write the JSON result to this file");
    cmd->callback([&ctx, c_target, k_max, model, output] {
        ctx.action = [=] {
            model->validate();
            if (*k_max < 0) throw std::domain_error("k-max must be non-negative");
            json candidates = json::array();
            std::optional<std::size_t> chosen;
            double chosen_dispersion = 0.0;
            std::size_t index = 0;
            for (int k = 0; k <= *k_max; ++k) {
                for (const auto branch : {components::Branch::plus, components::Branch::minus}) {
                    const components::DesignLength dl =
                        components::design_length(*c_target, k, branch, *model);
                    const double disp = components::splitting_dispersion(*c_target, k, branch, *model);
                    candidates.push_back(json{
                        {"k", k},
                        {"branch", branch == components::Branch::plus ? "plus" : "minus"},
                        {"l_int_um", dl.l_int_um},
                        {"valid", dl.valid},
                        {"dispersion_per_nm", disp},
                    });
                    if (dl.valid && (!chosen || disp < chosen_dispersion)) {
                        chosen = index;
                        chosen_dispersion = disp;
                    }
                    ++index;
                }
            }
            if (!chosen) {
                throw std::domain_error("no non-negative interaction length up to k-max; raise k-max");
            }
            json doc{
                {"c_target", *c_target},
                {"model", model_json(*model)},
                {"candidates", candidates},
                {"chosen_index", *chosen},
                {"chosen", candidates[*chosen]},
            };
            emit_json(doc, *output);
        };
    });
}

void add_fit_ring(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("fit-ring", "Fit the resonance-dip transmission model to a sweep");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto input = std::make_shared<std::string>();
    auto scale = std::make_shared<std::string>("linear");
    auto window_min = std::make_shared<double>(std::nan(""));
    auto window_max = std::make_shared<double>(std::nan(""));
    auto threshold = std::make_shared<double>(0.03);
    auto output = std::make_shared<std::string>();
    auto curve = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "Sweep CSV (wavelength_nm,value)")->required();
    cmd->add_option("--scale", *scale, "Input scale: linear or db");
    cmd->add_option("--window-min", *window_min, "Fit window lower edge (nm)");
    cmd->add_option("--window-max", *window_max, "Fit window upper edge (nm)");
    cmd->add_option("--dip-threshold", *threshold, "Minimum dip depth relative to background");
    cmd->add_option("--output", *output, "Also write the JSON result to this file");
    cmd->add_option("--curve", *curve, "Write wavelength_nm,measured,fitted CSV here");
    cmd->callback([&ctx, input, scale, window_min, window_max, threshold, output, curve] {
        ctx.action = [=] {
            const calib::SweepDataset data =
                calib::load_sweep_csv(*input, "device", "sweep", parse_scale(*scale));
            calib::RingFitOptions options;
            options.dip_threshold = *threshold;
            const double lo = std::isnan(*window_min) ? data.min_wavelength() : *window_min;
            const double hi = std::isnan(*window_max) ? data.max_wavelength() : *window_max;
            const calib::RingFit result = calib::fit_ring(data, lo, hi, options);
            json doc{
                {"fit", calib::to_json(result.fit)},
                {"window", {{"min_nm", lo}, {"max_nm", hi}}},
                {"derived",
                 {
                     {"q_int", components::intrinsic_q(result.params.lambda0_nm, result.params.w_int_nm)},
                     {"fwhm_nm", result.params.w_c_nm + result.params.w_int_nm},
                 }},
            };
            emit_json(doc, *output);
            if (!curve->empty()) {
                std::ostringstream os;
                os.precision(12);
                os << "wavelength_nm,measured,fitted\n";
                const calib::SweepDataset linear = data.to_linear();
                for (const auto& s : linear.samples) {
                    if (s.wavelength_nm < lo || s.wavelength_nm > hi) continue;
                    os << s.wavelength_nm << ',' << s.value << ','
                       << components::ring_transmission(s.wavelength_nm, result.params) << "\n";
                }
                write_text(*curve, os.str());
            }
        };
    });
}

void add_disambiguate(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand(
        "disambiguate", "Label fitted linewidth pairs as (w_c, w_int) across coupling gaps");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto input = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "CSV with header gap_nm,w_a_nm,w_b_nm")->required();
    cmd->add_option("--output", *output, "Also write the JSON result to this file");
    cmd->callback([&ctx, input, output] {
        ctx.action = [=] {
            std::ifstream in(*input);
            if (!in) throw std::runtime_error("cannot open " + *input);
            std::vector<calib::LinewidthObservation> observations;
            std::string line;
            bool header_seen = false;
            while (std::getline(in, line)) {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty() || line.front() == '#') continue;
                if (!header_seen) {
                    if (line != "gap_nm,w_a_nm,w_b_nm") {
                        throw std::runtime_error("unexpected header: " + line);
                    }
                    header_seen = true;
                    continue;
                }
                std::stringstream ss(line);
                std::string a, b, c;
                if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
                    throw std::runtime_error("malformed row: " + line);
                }
                observations.push_back(
                    calib::LinewidthObservation{std::stod(a), std::stod(b), std::stod(c)});
            }
            const calib::LinewidthAssignment result = calib::disambiguate_linewidths(observations);
            json devices = json::array();
            for (std::size_t i = 0; i < observations.size(); ++i) {
                devices.push_back(json{
                    {"gap_nm", observations[i].gap_nm},
                    {"w_c_nm", result.assigned[i].first},
                    {"w_int_nm", result.assigned[i].second},
                });
            }
            json doc{
                {"devices", devices},
                {"mean_w_int_nm", result.mean_w_int_nm},
                {"monotonic", result.monotonic},
                {"warning", result.warning},
            };
            emit_json(doc, *output);
        };
    });
}

void add_fit_coupler_sweep(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("fit-coupler-sweep",
                                   "Fit the sin^2 splitting-ratio model over interaction length");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto input = std::make_shared<std::string>();
    auto lambda = std::make_shared<double>(0.0);
    auto ellc_init = std::make_shared<double>(std::nan(""));
    auto ell0_init = std::make_shared<double>(std::nan(""));
    auto output = std::make_shared<std::string>();
    auto curve = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "CSV with header l_int_um,c")->required();
    cmd->add_option("--lambda", *lambda, "Wavelength the sweep was taken at (nm)")->required();
    cmd->add_option("--ell-c-init", *ellc_init, "Optional initial coupling length (um)");
    cmd->add_option("--ell-0-init", *ell0_init, "Optional initial offset length (um)");
    cmd->add_option("--output", *output, "Also write the JSON result to this file");
    cmd->add_option("--curve", *curve, "Write l_int_um,fitted_c CSV here");
    cmd->callback([&ctx, input, lambda, ellc_init, ell0_init, output, curve] {
        ctx.action = [=] {
            const auto points = synth::load_coupler_sweep_csv(*input);
            std::optional<components::CouplerModel> initial;
            if (!std::isnan(*ellc_init)) {
                initial = components::CouplerModel{
                    .ell_c_um = *ellc_init,
                    .ell_0_um = std::isnan(*ell0_init) ? 0.0 : *ell0_init,
                    .dell_c_dlambda = 0.0,
                    .dell_0_dlambda = 0.0,
                };
            }
            const calib::CouplerSweepFit result = calib::fit_coupler_sweep(points, *lambda, initial);
            json doc{
                {"fit", calib::to_json(result.fit)},
                {"lambda_nm", result.lambda_nm},
                {"model", model_json(result.model)},
            };
            emit_json(doc, *output);
            if (!curve->empty()) {
                double l_max = 0.0;
                for (const auto& p : points) l_max = std::max(l_max, p.l_int_um);
                std::ostringstream os;
                os.precision(12);
                os << "l_int_um,fitted_c\n";
                for (int i = 0; i <= 400; ++i) {
                    const double l = l_max * i / 400.0;
                    os << l << ',' << components::cross_power(l, result.model) << "\n";
                }
                write_text(*curve, os.str());
            }
        };
    });
}

void add_fit_mzi_phase(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand(
        "fit-mzi-phase", "Extract the cross/bar phase from the two interferometer fringe sweeps");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto left = std::make_shared<std::string>();
    auto right = std::make_shared<std::string>();
    auto scale = std::make_shared<std::string>("linear");
    auto threshold = std::make_shared<double>(0.05);
    auto output = std::make_shared<std::string>();
    auto curves = std::make_shared<std::string>();
    cmd->add_option("--left", *left, "Left-output sweep CSV")->required();
    cmd->add_option("--right", *right, "Right-output sweep CSV")->required();
    cmd->add_option("--scale", *scale, "Input scale: linear or db");
    cmd->add_option("--contrast-threshold", *threshold, "Minimum fitted fringe contrast |B|/A");
    cmd->add_option("--output", *output, "Also write the JSON result to this file");
    cmd->add_option("--curves", *curves, "Write fitted fringe curves CSV here");
    cmd->callback([&ctx, left, right, scale, threshold, output, curves] {
        ctx.action = [=] {
            const calib::TransmissionScale s = parse_scale(*scale);
            const calib::SweepDataset l = calib::load_sweep_csv(*left, "mzi", "left", s);
            const calib::SweepDataset r = calib::load_sweep_csv(*right, "mzi", "right", s);
            calib::MziPhaseOptions options;
            options.contrast_threshold = *threshold;
            const calib::BsPhaseResult result = calib::extract_bs_phase(l, r, options);
            json doc{
                {"phase_rad", result.phase_rad},
                {"phase_over_pi", result.phase_rad / std::numbers::pi},
                {"fringes", fringe_json(result.fringes)},
                {"fit", calib::to_json(result.fit)},
            };
            emit_json(doc, *output);
            if (!curves->empty()) {
                const auto& f = result.fringes;
                const auto fitted = [](double lambda, double offset, double amplitude,
                                       double lambda_max, double period) {
                    return offset +
                           amplitude * std::cos(2.0 * std::numbers::pi * (lambda - lambda_max) / period);
                };
                std::ostringstream os;
                os.precision(12);
                os << "wavelength_nm,side,measured,fitted\n";
                const calib::SweepDataset ll = l.to_linear();
                for (const auto& sample : ll.samples) {
                    os << sample.wavelength_nm << ",left," << sample.value << ','
                       << fitted(sample.wavelength_nm, f.offset_left, f.amplitude_left,
                                 f.lambda_max_left_nm, f.period_nm)
                       << "\n";
                }
                const calib::SweepDataset rr = r.to_linear();
                for (const auto& sample : rr.samples) {
                    os << sample.wavelength_nm << ",right," << sample.value << ','
                       << fitted(sample.wavelength_nm, f.offset_right, f.amplitude_right,
                                 f.lambda_max_right_nm, f.period_nm)
                       << "\n";
                }
                write_text(*curves, os.str());
            }
        };
    });
}

void add_calibrate_insertion(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand(
        "calibrate-insertion",
        "Solve the port-transmission calibration and report per-device insertion loss");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto manifest = std::make_shared<std::string>();
    auto order = std::make_shared<int>(15);
    auto output = std::make_shared<std::string>();
    auto box = std::make_shared<std::string>();
    cmd->add_option("--manifest", *manifest, "Manifest JSON binding sweep files to roles")->required();
    cmd->add_option("--order", *order, "Polynomial order of the calibration functions");
    cmd->add_option("--output", *output, "Also write the JSON report to this file");
    cmd->add_option("--box-data", *box, "Write device,corrected_db,uncorrected_db CSV here");
    cmd->callback([&ctx, manifest, order, output, box] {
        ctx.action = [=] {
            const calib::InsertionInput input = calib::load_insertion_manifest(*manifest);
            calib::InsertionOptions options;
            options.poly_order = *order;
            const calib::InsertionReport report = calib::calibrate_insertion(input, options);
            emit_json(calib::to_json(report), *output);
            if (!box->empty()) {
                std::ostringstream os;
                os.precision(12);
                os << "device,corrected_db,uncorrected_db\n";
                for (const auto& d : report.devices) {
                    os << d.device_id << ',' << d.corrected_db << ',' << d.uncorrected_db << "\n";
                }
                write_text(*box, os.str());
            }
        };
    });
}

void add_fit_cnot(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand(
        "fit-cnot", "Fit the two splitting ratios of the gate circuit to a measured power matrix");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto input = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "4x4 matrix CSV, rows = output ports")->required();
    cmd->add_option("--output", *output, "Also write the JSON result to this file");
    cmd->callback([&ctx, input, output] {
        ctx.action = [=] {
            const calib::TransmissionMatrix measured = synth::load_matrix_csv(*input);
            const calib::CnotTransmissionFit result = calib::fit_cnot_transmission(measured);
            json doc{
                {"fit", calib::to_json(result.fit)},
                {"mean_abs_deviation", result.mean_abs_deviation},
                {"model_matrix", matrix_json(result.model_matrix)},
            };
            emit_json(doc, *output);
        };
    });
}

void add_cnot_report(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand(
        "cnot-report", "Post-selected truth-table fidelity and success probability");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto c_half = std::make_shared<double>(0.5);
    auto c_twothirds = std::make_shared<double>(2.0 / 3.0);
    auto output = std::make_shared<std::string>();
    cmd->add_option("--c-half", *c_half, "Splitting ratio of the nominal-1/2 couplers");
    cmd->add_option("--c-twothirds", *c_twothirds, "Splitting ratio of the nominal-2/3 couplers");
    cmd->add_option("--output", *output, "Also write the JSON result to this file");
    cmd->callback([&ctx, c_half, c_twothirds, output] {
        ctx.action = [=] {
            const quantum::GateReport report = quantum::cnot_report(*c_half, *c_twothirds);
            emit_json(report_json(report), *output);
        };
    });
}

void add_fidelity_map(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("fidelity-map",
                                   "Gridded gate fidelity over the two splitting ratios");
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto options = std::make_shared<quantum::FidelityMapOptions>();
    auto fitted_half = std::make_shared<double>(std::nan(""));
    auto fitted_twothirds = std::make_shared<double>(std::nan(""));
    auto output = std::make_shared<std::string>("fidelity_map.csv");
    auto gnuplot = std::make_shared<std::string>();
    auto summary = std::make_shared<std::string>();
    cmd->add_option("--c-half-min", options->c_half_min, "Grid lower edge of the 1/2-coupler ratio");
    cmd->add_option("--c-half-max", options->c_half_max, "Grid upper edge of the 1/2-coupler ratio");
    cmd->add_option("--c-twothirds-min", options->c_twothirds_min,
                    "Grid lower edge of the 2/3-coupler ratio");
    cmd->add_option("--c-twothirds-max", options->c_twothirds_max,
                    "Grid upper edge of the 2/3-coupler ratio");
    cmd->add_option("--n-half", options->n_half, "Grid samples along the 1/2-coupler axis");
    cmd->add_option("--n-twothirds", options->n_twothirds, "Grid samples along the 2/3-coupler axis");
    cmd->add_option("--fitted-c-half", *fitted_half, "Mark this fitted point (with --fitted-c-twothirds)");
    cmd->add_option("--fitted-c-twothirds", *fitted_twothirds, "Second coordinate of the fitted point");
    cmd->add_option("--output", *output, "Map CSV path");
    cmd->add_option("--gnuplot", *gnuplot, "Write a gnuplot script template here");
    cmd->add_option("--summary", *summary, "Also write the JSON summary to this file");
    cmd->callback([&ctx, options, fitted_half, fitted_twothirds, output, gnuplot, summary] {
        ctx.action = [=] {
            if (std::isnan(*fitted_half) != std::isnan(*fitted_twothirds)) {
                throw UsageError("--fitted-c-half and --fitted-c-twothirds must come together");
            }
            if (!std::isnan(*fitted_half)) {
                options->fitted_point = std::make_pair(*fitted_half, *fitted_twothirds);
            }
            const quantum::FidelityMap map = quantum::fidelity_map(*options);
            quantum::write_fidelity_map_csv(map, *output);
            double best = -1.0;
            std::size_t best_i = 0;
            std::size_t best_j = 0;
            for (std::size_t i = 0; i < map.c_half_values.size(); ++i) {
                for (std::size_t j = 0; j < map.c_twothirds_values.size(); ++j) {
                    const double f = map.fidelity_at(i, j);
                    if (std::isfinite(f) && f > best) {
                        best = f;
                        best_i = i;
                        best_j = j;
                    }
                }
            }
            json doc{
                {"csv", *output},
                {"n_half", map.c_half_values.size()},
                {"n_twothirds", map.c_twothirds_values.size()},
                {"max_fidelity", best},
                {"max_cell",
                 {{"c_half", map.c_half_values[best_i]}, {"c_twothirds", map.c_twothirds_values[best_j]}}},
            };
            if (map.ideal_cell) {
                doc["ideal_cell"] = {{"row", map.ideal_cell->first},
                                     {"col", map.ideal_cell->second},
                                     {"c_half", map.c_half_values[map.ideal_cell->first]},
                                     {"c_twothirds", map.c_twothirds_values[map.ideal_cell->second]}};
            }
            if (map.fitted_cell) {
                doc["fitted_cell"] = {{"row", map.fitted_cell->first},
                                      {"col", map.fitted_cell->second},
                                      {"c_half", map.c_half_values[map.fitted_cell->first]},
                                      {"c_twothirds", map.c_twothirds_values[map.fitted_cell->second]}};
            }
            emit_json(doc, *summary);
            if (!gnuplot->empty()) {
                std::ostringstream os;
                os << "# Render the fidelity map CSV with gnuplot.\n"
                   << "set datafile separator ','\n"
                   << "set xlabel 'C_{1/2}'\n"
                   << "set ylabel 'C_{2/3}'\n"
                   << "set cblabel 'fidelity'\n"
                   << "set view map\n"
                   << "splot '" << *output << "' every ::1 using 1:2:3 with points pt 5 ps 1 palette\n";
                write_text(*gnuplot, os.str());
            }
        };
    });
}

void add_synth(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("synth", "Generate synthetic datasets with seeded noise");
    cmd->require_subcommand(1);

    {
        auto* ring = cmd->add_subcommand("ring", "Resonance sweep of the ring transmission model");
        ring->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        auto config = std::make_shared<synth::RingSynthConfig>();
        auto output = std::make_shared<std::string>("ring.csv");
        ring->add_option("--lambda0", config->params.lambda0_nm, "Resonance wavelength (nm)");
        ring->add_option("--w-int", config->params.w_int_nm, "Internal linewidth (nm)");
        ring->add_option("--w-c", config->params.w_c_nm, "Coupling linewidth (nm)");
        ring->add_option("--t0", config->params.T0, "Background transmission");
        ring->add_option("--f-c", config->params.F_c, "Fringe contrast coefficient");
        ring->add_option("--lambda-fp", config->params.lambda_fp_nm, "Fringe reference wavelength (nm)");
        ring->add_option("--fsr-fp", config->params.fsr_fp_nm, "Fringe period (nm)");
        ring->add_option("--lambda-min", config->lambda_min_nm, "Sweep start (nm)");
        ring->add_option("--lambda-max", config->lambda_max_nm, "Sweep end (nm)");
        ring->add_option("--lambda-step", config->step_nm, "Sweep step (nm)");
        ring->add_option("--noise", config->noise_sigma, "Multiplicative log-normal sigma");
        ring->add_option("--seed", config->seed, "Noise seed");
        ring->add_option("--output", *output, "Sweep CSV path");
        ring->callback([&ctx, config, output] {
            ctx.action = [=] {
                calib::save_sweep_csv(synth::synth_ring(*config), *output);
                emit_json(json{{"csv", *output}, {"seed", config->seed}}, "");
            };
        });
    }
    {
        auto* sweep = cmd->add_subcommand("coupler-sweep",
                                          "Splitting ratio versus interaction length at one wavelength");
        sweep->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        auto config = std::make_shared<synth::CouplerSweepSynthConfig>();
        auto output = std::make_shared<std::string>("coupler_sweep.csv");
        sweep->add_option("--ell-c", config->model.ell_c_um, "Coupling length (um)");
        sweep->add_option("--ell-0", config->model.ell_0_um, "Offset length (um)");
        sweep->add_option("--l-min", config->l_min_um, "Shortest interaction length (um)");
        sweep->add_option("--l-max", config->l_max_um, "Longest interaction length (um)");
        sweep->add_option("--n-points", config->n_points, "Number of devices in the sweep");
        sweep->add_option("--lambda", config->lambda_nm, "Wavelength of the sweep (nm)");
        sweep->add_option("--noise", config->noise_sigma, "Port-power log-normal sigma");
        sweep->add_option("--seed", config->seed, "Noise seed");
        sweep->add_option("--output", *output, "Sweep-point CSV path");
        sweep->callback([&ctx, config, output] {
            ctx.action = [=] {
                synth::save_coupler_sweep_csv(synth::synth_coupler_sweep(*config), *output);
                emit_json(json{{"csv", *output}, {"seed", config->seed}}, "");
            };
        });
    }
    {
        auto* mzi = cmd->add_subcommand("mzi-pair", "Fringe sweeps of the double interferometer");
        mzi->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        auto config = std::make_shared<synth::MziSynthConfig>();
        auto kind = std::make_shared<std::string>("coupler");
        auto left = std::make_shared<std::string>("mzi_left.csv");
        auto right = std::make_shared<std::string>("mzi_right.csv");
        mzi->add_option("--kind", *kind, "Device in the middle: coupler or symmetric");
        mzi->add_option("--coupler-cross", config->coupler_cross, "Splitting ratio of the device");
        mzi->add_option("--n-eff", config->n_eff, "Effective index of the arms");
        mzi->add_option("--delta-l", config->delta_l_um, "Arm length imbalance (um)");
        mzi->add_option("--lambda-min", config->lambda_min_nm, "Sweep start (nm)");
        mzi->add_option("--lambda-max", config->lambda_max_nm, "Sweep end (nm)");
        mzi->add_option("--lambda-step", config->step_nm, "Sweep step (nm)");
        mzi->add_option("--noise", config->noise_sigma, "Multiplicative log-normal sigma");
        mzi->add_option("--seed", config->seed, "Noise seed");
        mzi->add_option("--output-left", *left, "Left-output CSV path");
        mzi->add_option("--output-right", *right, "Right-output CSV path");
        mzi->callback([&ctx, config, kind, left, right] {
            ctx.action = [=] {
                if (*kind == "coupler") {
                    config->kind = synth::MziDeviceKind::coupler_under_test;
                } else if (*kind == "symmetric") {
                    config->kind = synth::MziDeviceKind::symmetric_reference;
                } else {
                    throw UsageError("--kind must be 'coupler' or 'symmetric'");
                }
                const synth::MziPair pair = synth::synth_mzi_pair(*config);
                calib::save_sweep_csv(pair.left, *left);
                calib::save_sweep_csv(pair.right, *right);
                emit_json(json{{"left_csv", *left}, {"right_csv", *right}, {"seed", config->seed}}, "");
            };
        });
    }
    {
        auto* chip = cmd->add_subcommand("insertion-chip",
                                         "Calibration structures plus coupler devices under test");
        chip->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        auto config = std::make_shared<synth::InsertionSynthConfig>();
        auto dir = std::make_shared<std::string>("insertion_chip");
        chip->add_option("--n-duts", config->n_duts, "Number of devices under test");
        chip->add_option("--true-loss", config->true_loss_db, "True insertion loss per device (dB)");
        chip->add_option("--port-sigma", config->port_sigma, "Per-port alignment log-normal sigma");
        chip->add_option("--sample-sigma", config->sample_sigma, "Per-sample log-normal sigma");
        chip->add_option("--lambda-min", config->lambda_min_nm, "Sweep start (nm)");
        chip->add_option("--lambda-max", config->lambda_max_nm, "Sweep end (nm)");
        chip->add_option("--lambda-step", config->step_nm, "Sweep step (nm)");
        chip->add_option("--seed", config->seed, "Noise seed");
        chip->add_option("--output-dir", *dir, "Directory for manifest.json and sweep CSVs");
        chip->callback([&ctx, config, dir] {
            ctx.action = [=] {
                synth::write_insertion_chip(synth::synth_insertion_chip(*config), *dir);
                emit_json(json{{"manifest", (std::filesystem::path(*dir) / "manifest.json").string()},
                               {"seed", config->seed}},
                          "");
            };
        });
    }
    {
        auto* matrix = cmd->add_subcommand("cnot-matrix", "Logical-port power matrix of the gate circuit");
        matrix->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        auto config = std::make_shared<synth::CnotMatrixSynthConfig>();
        auto output = std::make_shared<std::string>("cnot_matrix.csv");
        matrix->add_option("--c-half", config->c_half, "Splitting ratio of the nominal-1/2 couplers");
        matrix->add_option("--c-twothirds", config->c_twothirds,
                           "Splitting ratio of the nominal-2/3 couplers");
        matrix->add_option("--noise", config->noise_mean_abs, "Mean absolute additive noise");
        matrix->add_option("--seed", config->seed, "Noise seed");
        matrix->add_option("--output", *output, "Matrix CSV path");
        matrix->callback([&ctx, config, output] {
            ctx.action = [=] {
                synth::save_matrix_csv(synth::synth_cnot_matrix(*config), *output);
                emit_json(json{{"csv", *output}, {"seed", config->seed}}, "");
            };
        });
    }
}

}  // namespace

int run(const std::vector<std::string>& args) {
    std::vector<std::string> merged;
    try {
        merged = apply_config(args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App app{"Design, calibration, and simulation toolkit for integrated photonic circuits"};
    app.require_subcommand(1);
    CommandContext ctx;
    add_design_coupler(app, ctx);
    add_fit_ring(app, ctx);
    add_disambiguate(app, ctx);
    add_fit_coupler_sweep(app, ctx);
    add_fit_mzi_phase(app, ctx);
    add_calibrate_insertion(app, ctx);
    add_fit_cnot(app, ctx);
    add_cnot_report(app, ctx);
    add_fidelity_map(app, ctx);
    add_synth(app, ctx);

    try {
        std::vector<std::string> reversed(merged.rbegin(), merged.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (!ctx.action) {
        std::cerr << "error: no subcommand selected\n";
        return kExitUsage;
    }
    try {
        ctx.action();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace photonic::cli
