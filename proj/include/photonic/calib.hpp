#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "photonic/components.hpp"
#include "photonic/least_squares.hpp"
#include "photonic/sweep.hpp"

// Fitters: ring resonances, linewidth disambiguation across coupling gaps,
// coupler splitting-ratio sweeps, interferometer fringe phase extraction,
// and the two-parameter transmission fit of the post-selected gate circuit.
namespace photonic::calib {

struct NoResonanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonIdentifiableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LowContrastError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dominant oscillation of a sweep from a coarse-to-fine frequency scan of
/// the demeaned data. phase_max_nm is a wavelength where the fitted cosine
/// peaks, reduced into [first sample, first sample + period).
struct PeriodEstimate {
    double period_nm = 0.0;
    double phase_max_nm = 0.0;
    double amplitude = 0.0;
    double mean = 0.0;
};

PeriodEstimate estimate_dominant_period(const std::vector<SweepSample>& samples);

struct RingFitOptions {
    double dip_threshold = 0.03;     // minimum dip depth relative to the background
    double exclude_fwhm_mult = 3.0;  // dip exclusion half-width (in FWHMs) for background guesses
    FitOptions engine;
};

/// Fit of the resonance-dip-times-fringe transmission model. Parameters are
/// canonicalized: w_c >= w_int (the labeling is not identifiable from a
/// single device; see disambiguate_linewidths) and lambda_fp shifted by
/// whole fringe periods to the value nearest lambda0.
struct RingFit {
    FitResult fit;  // lambda0_nm, w_c_nm, w_int_nm, T0, F_c, lambda_fp_nm, fsr_fp_nm
    components::RingParams params;
};

RingFit fit_ring(const SweepDataset& data, double window_min_nm, double window_max_nm,
                 const RingFitOptions& options = {});
RingFit fit_ring(const SweepDataset& data, const RingFitOptions& options = {});

/// One device's ring fit reduced to what disambiguation needs: the
/// waveguide-ring gap and the unordered fitted linewidth pair.
struct LinewidthObservation {
    double gap_nm = 0.0;
    double w_a_nm = 0.0;
    double w_b_nm = 0.0;
};

struct LinewidthAssignment {
    std::vector<std::pair<double, double>> assigned;  // (w_c, w_int) per device, input order
    double mean_w_int_nm = 0.0;
    bool monotonic = false;  // w_c non-increasing in gap was satisfiable
    std::string warning;
};

/// Chooses, over all 2^n labelings, the one minimizing the variance of
/// w_int subject to w_c non-increasing in gap; falls back to the best
/// variance with a warning when no labeling is monotone.
LinewidthAssignment disambiguate_linewidths(const std::vector<LinewidthObservation>& observations);

struct CouplerSweepPoint {
    double l_int_um = 0.0;
    double cross = 0.0;
};

struct CouplerSweepFit {
    FitResult fit;  // ell_c_um, ell_0_um
    components::CouplerModel model;  // wavelength derivatives zero; valid at lambda_nm only
    double lambda_nm = 0.0;
};

/// Fits the sin^2 splitting-ratio model over interaction length at one
/// wavelength. The initial guess comes from a deterministic coarse grid
/// over (ell_c, ell_0) unless one is supplied.
CouplerSweepFit fit_coupler_sweep(const std::vector<CouplerSweepPoint>& points, double lambda_nm,
                                  std::optional<components::CouplerModel> initial = std::nullopt,
                                  const FitOptions& engine = {});

struct MziFringeFit {
    double period_nm = 0.0;  // shared between the two outputs
    double lambda_max_left_nm = 0.0;
    double lambda_max_right_nm = 0.0;
    double offset_left = 0.0;
    double amplitude_left = 0.0;
    double offset_right = 0.0;
    double amplitude_right = 0.0;
};

struct BsPhaseResult {
    double phase_rad = 0.0;  // 2 pi (lambda_max_left - lambda_max_right) / period, in (-pi, pi]
    MziFringeFit fringes;
    FitResult fit;
};

struct MziPhaseOptions {
    double contrast_threshold = 0.05;  // minimum fitted |B|/A per output
    FitOptions engine;
};

/// Joint cosine-fringe fit A + B cos(2 pi (lambda - lambda_max)/period) to
/// the two interferometer outputs with a shared period; the phase between
/// the device's cross and bar coefficients is the peak separation in
/// periods, wrapped to (-pi, pi].
BsPhaseResult extract_bs_phase(const SweepDataset& left, const SweepDataset& right,
                               const MziPhaseOptions& options = {});

using TransmissionMatrix = std::array<std::array<double, 4>, 4>;  // [output][input], logical ports

struct CnotTransmissionFit {
    FitResult fit;  // c_half, c_twothirds
    double mean_abs_deviation = 0.0;
    TransmissionMatrix model_matrix{};  // at the fitted parameters
};

/// Two-parameter fit of the compiled gate circuit's logical-port power
/// matrix to a measured one; couplers sharing a design share a parameter.
/// Entries are weighted uniformly.
CnotTransmissionFit fit_cnot_transmission(const TransmissionMatrix& measured,
                                          const FitOptions& engine = {});

/// The model matrix itself: |S'|^2 over logical ports at the given ratios.
TransmissionMatrix cnot_transmission_model(double c_half, double c_twothirds);

}  // namespace photonic::calib
