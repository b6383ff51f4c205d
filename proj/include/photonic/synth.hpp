#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "photonic/calib.hpp"
#include "photonic/components.hpp"
#include "photonic/insertion.hpp"
#include "photonic/sweep.hpp"

// Seeded synthetic-data generators closing the round trips with the
// fitters. All randomness flows through Rng below, which is reproducible
// across platforms (documented in the README); measurement noise is
// multiplicative log-normal on linear power unless stated otherwise.
namespace photonic::synth {

inline constexpr std::uint64_t kDefaultSeed = 12345;

/// Deterministic portable generator: raw mt19937_64 output mapped to
/// doubles explicitly, normals by Box-Muller; the standard library's
/// distributions are not reproducible across implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal();

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct RingSynthConfig {
    components::RingParams params{
        .lambda0_nm = 1552.0,
        .w_int_nm = 0.00665,
        .w_c_nm = 0.020,
        .T0 = 0.9,
        .F_c = 0.3,
        .lambda_fp_nm = 1551.8,
        .fsr_fp_nm = 0.8,
    };
    double lambda_min_nm = 1550.0;
    double lambda_max_nm = 1554.0;
    double step_nm = 0.001;
    double noise_sigma = 0.005;  // log-normal sigma per sample
    std::uint64_t seed = kDefaultSeed;
};

calib::SweepDataset synth_ring(const RingSynthConfig& config);

struct CouplerSweepSynthConfig {
    components::CouplerModel model = components::default_coupler_model();
    double l_min_um = 0.0;
    double l_max_um = 50.0;
    int n_points = 22;
    double lambda_nm = 1554.0;
    double noise_sigma = 0.01;  // log-normal on each port power before ratioing
    std::uint64_t seed = kDefaultSeed;
};

std::vector<calib::CouplerSweepPoint> synth_coupler_sweep(const CouplerSweepSynthConfig& config);
void save_coupler_sweep_csv(const std::vector<calib::CouplerSweepPoint>& points,
                            const std::filesystem::path& csv_path);
std::vector<calib::CouplerSweepPoint> load_coupler_sweep_csv(const std::filesystem::path& csv_path);

enum class MziDeviceKind {
    coupler_under_test,   // device coupler between the two interferometers
    symmetric_reference,  // plain splitter pair, no device in the middle
};

struct MziSynthConfig {
    MziDeviceKind kind = MziDeviceKind::coupler_under_test;
    double coupler_cross = 0.5;  // splitting ratio of the device under test
    double n_eff = 1.55;         // arbitrary synthetic value, not a measured one
    double delta_l_um = 500.0;   // arm imbalance; arbitrary synthetic value
    double lambda_min_nm = 1548.0;
    double lambda_max_nm = 1556.0;
    double step_nm = 0.005;
    double noise_sigma = 0.002;
    std::uint64_t seed = kDefaultSeed;
};

struct MziPair {
    calib::SweepDataset left;
    calib::SweepDataset right;
};

/// Two unbalanced interferometers sharing the device under test, driven
/// through the circuit compiler; outputs are the two fringe sweeps.
MziPair synth_mzi_pair(const MziSynthConfig& config);

struct InsertionSynthConfig {
    int n_duts = 22;
    double true_loss_db = 0.06;  // identical for every device under test
    double port_sigma = 0.013;   // per (device, port) alignment factor, log-normal
    double sample_sigma = 0.005; // per wavelength sample, log-normal
    double lambda_min_nm = 1548.0;
    double lambda_max_nm = 1560.0;
    double step_nm = 0.05;
    std::uint64_t seed = kDefaultSeed;
};

/// Full synthetic chip: one calibration structure of each type plus n_duts
/// couplers of varying splitting ratio, all sharing smooth low-order port
/// transmissions with a 1 dB through/cross difference and a -0.8 dB
/// splitter factor.
calib::InsertionInput synth_insertion_chip(const InsertionSynthConfig& config);

/// Writes manifest.json plus one `<device>_<role>.csv` per sweep.
void write_insertion_chip(const calib::InsertionInput& input, const std::filesystem::path& dir);

struct CnotMatrixSynthConfig {
    double c_half = 0.5;
    double c_twothirds = 2.0 / 3.0;
    double noise_mean_abs = 0.02;  // additive Gaussian, clipped to [0, 1]
    std::uint64_t seed = kDefaultSeed;
};

calib::TransmissionMatrix synth_cnot_matrix(const CnotMatrixSynthConfig& config);
void save_matrix_csv(const calib::TransmissionMatrix& m, const std::filesystem::path& csv_path);
calib::TransmissionMatrix load_matrix_csv(const std::filesystem::path& csv_path);

}  // namespace photonic::synth
