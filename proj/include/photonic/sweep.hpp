#pragma once

#include <filesystem>
#include <string>
#include <vector>

// Wavelength-sweep containers shared by the fitters and the synthetic
// generators, with the CSV interchange format `wavelength_nm,value`.
namespace photonic::calib {

enum class TransmissionScale { linear, dB };

struct SweepSample {
    double wavelength_nm = 0.0;
    double value = 0.0;
};

struct SweepDataset {
    std::string device_id;
    std::string port_id;
    std::vector<SweepSample> samples;
    TransmissionScale scale = TransmissionScale::linear;

    void validate() const;  // strictly increasing wavelengths; linear values >= 0
    SweepDataset to_linear() const;
    SweepDataset to_db() const;  // zero linear transmission has no dB image
    double min_wavelength() const;
    double max_wavelength() const;
};

SweepDataset load_sweep_csv(const std::filesystem::path& csv_path, std::string device_id = "",
                            std::string port_id = "",
                            TransmissionScale scale = TransmissionScale::linear);
void save_sweep_csv(const SweepDataset& data, const std::filesystem::path& csv_path);

/// Boxcar average over a wavelength window (default 2 nm), sample by
/// sample; window edges shrink near the sweep ends.
SweepDataset boxcar_average(const SweepDataset& data, double window_nm = 2.0);

}  // namespace photonic::calib
