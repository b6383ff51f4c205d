#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "photonic/sweep.hpp"

// Simultaneous log-domain calibration of the chip's port transmissions and
// splitter factor, and the corrected insertion loss of each device under
// test.
namespace photonic::calib {

/// Chebyshev polynomials (in dB) of the three port transmissions and the
/// splitter factor over [lambda_min, lambda_max].
struct CalibrationSolution {
    int order = 15;
    double lambda_min_nm = 0.0;
    double lambda_max_nm = 0.0;
    std::vector<double> t1_coeffs;  // reference-port transmission
    std::vector<double> t3_coeffs;  // through-port transmission
    std::vector<double> t4_coeffs;  // cross-port transmission
    std::vector<double> y_coeffs;   // splitter factor

    double t1_db(double lambda_nm) const;
    double t3_db(double lambda_nm) const;
    double t4_db(double lambda_nm) const;
    double y_db(double lambda_nm) const;
    void validate() const;  // finite over the fitted range
};

/// One calibration structure. Type 1 is a bare reference path; type 2 adds
/// the splitter and the through port; type 3 the splitter and the cross
/// port.
struct CalibrationRun {
    int device_type = 0;  // 1, 2, or 3
    std::string device_id;
    SweepDataset reference;
    std::optional<SweepDataset> through;  // type 2
    std::optional<SweepDataset> cross;    // type 3
};

struct DutRun {
    std::string device_id;
    SweepDataset reference;
    SweepDataset through;
    SweepDataset cross;
};

struct InsertionInput {
    std::vector<CalibrationRun> calibration;
    std::vector<DutRun> duts;
};

struct DeviceInsertion {
    std::string device_id;
    double corrected_db = 0.0;    // port-transmission-corrected loss, positive = loss
    double uncorrected_db = 0.0;  // raw (P_t + P_c)/P_ref, no port correction
};

struct InsertionStats {
    double mean_db = 0.0;
    double stddev_db = 0.0;
    double median_db = 0.0;
    double q1_db = 0.0;
    double q3_db = 0.0;
};

struct InsertionOptions {
    int poly_order = 15;
};

struct InsertionReport {
    CalibrationSolution solution;
    double calibration_rms_db = 0.0;  // residual of the simultaneous fit
    std::vector<DeviceInsertion> devices;
    InsertionStats corrected{};
    InsertionStats uncorrected{};
};

/// Solves the linear least-squares problem in the dB domain for all four
/// polynomial functions simultaneously, then reports each device's
/// insertion loss (P_t/T3 + P_c/T4)/(P_ref/T1) in dB, averaged over its
/// sweep. Missing calibration device types raise NonIdentifiableError
/// (declared in calib.hpp) naming the unresolved function.
InsertionReport calibrate_insertion(const InsertionInput& input, const InsertionOptions& options = {});

/// Manifest JSON: {"scale": "linear"|"dB" (optional), "calibration":
/// [{"device", "type", "reference", "through"?, "cross"?}], "duts":
/// [{"device", "reference", "through", "cross"}]}. File paths resolve
/// relative to the manifest's directory.
InsertionInput load_insertion_manifest(const std::filesystem::path& manifest_path);

nlohmann::json to_json(const InsertionReport& report);

}  // namespace photonic::calib
