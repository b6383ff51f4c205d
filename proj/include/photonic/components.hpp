#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Analytic forward models of ring resonators and directional couplers,
// the coupler design solver, and the fabrication-sensitivity ledger.
namespace photonic::components {

/// Parameters of the ring transmission model: a Lorentzian resonance dip
/// multiplied by a Fabry-Perot fringe background from the grating couplers.
struct RingParams {
    double lambda0_nm = 0.0;   // resonance wavelength
    double w_int_nm = 0.0;     // internal linewidth
    double w_c_nm = 0.0;       // coupling linewidth
    double T0 = 1.0;           // background transmission
    double F_c = 0.0;          // fringe contrast coefficient
    double lambda_fp_nm = 0.0; // fringe reference wavelength
    double fsr_fp_nm = 1.0;    // fringe period

    void validate() const;  // throws std::domain_error
};

struct RingGeometry {
    double radius_um = 0.0;
    double fsr_nm = 0.0;

    void validate() const;
};

/// T(lambda) = T0 / (1 + F_c sin^2(pi (l - l_fp)/FSR_fp))
///           * (1 - w_c w_int / ((w_c + w_int)^2/4 + (l - l0)^2))
double ring_transmission(double lambda_nm, const RingParams& p);

/// n_g = lambda^2 / (2 pi R FSR)
double group_index(const RingGeometry& g, double lambda_nm);

/// Q_int = lambda0 / w_int
double intrinsic_q(double lambda0_nm, double w_int_nm);

struct PropagationLoss {
    double alpha_per_cm = 0.0;
    double alpha_db_per_cm = 0.0;
};

/// alpha = 2 pi n_g / (Q_int lambda), converted to 1/cm and dB/cm.
PropagationLoss propagation_loss(double n_g, double q_int, double lambda_nm);

/// Mode-solver reference values behind the coupling-length scale. Nothing
/// consumes these; they document where the sensitivity ledger's nominal
/// cross-section sits. The coupling length is lambda / (2 delta_n).
inline constexpr double kIsolatedWaveguideNeff = 1.548;   // wide-slot limit
inline constexpr double kSupermodeSplittingNominal = 0.02069;
inline constexpr double kSupermodeSplittingNarrowed = 0.02135;  // width -25 nm

/// Local coupled-mode description of a directional coupler at one
/// wavelength: coupling length, offset length, and their first
/// derivatives in wavelength.
struct CouplerModel {
    double ell_c_um = 0.0;
    double ell_0_um = 0.0;
    double dell_c_dlambda = 0.0;  // um per nm
    double dell_0_dlambda = 0.0;  // um per nm

    void validate() const;  // hard constraints only (ell_c > 0, finite values)

    /// True when the derivative signs match the usual behavior of these
    /// couplers (ell_c shrinking and ell_0 growing with wavelength).
    /// A false return is worth a warning, not a rejection.
    bool has_expected_dispersion_signs() const;
};

/// Cross-over power fraction C = sin^2( (pi/2) (L + ell_0) / ell_c ).
double cross_power(double l_int_um, const CouplerModel& m);

enum class Branch { plus, minus };

struct DesignLength {
    double l_int_um = 0.0;
    bool valid = false;  // false when the closed form lands at negative length
};

/// Interaction length realizing a target splitting ratio:
/// L = ell_c [2k +/- arccos(1 - 2C)/pi] - ell_0.
DesignLength design_length(double c_target, int k, Branch branch, const CouplerModel& m);

/// |dC/dlambda| (per nm) of the splitting ratio at the (C, k, branch)
/// design point, from the wavelength derivatives of ell_c and ell_0.
double splitting_dispersion(double c, int k, Branch branch, const CouplerModel& m);

/// dC/d(ell_c) (per um) at a fixed interaction length.
double cross_power_sensitivity(double l_int_um, const CouplerModel& m);

/// Coupler model at 1554 nm. Reconstructed from the published pair of
/// reference design lengths and their splitting ratios, not a direct
/// measurement; dispersion slopes are chosen to match the in-band
/// splitting-ratio drift of those devices.
CouplerModel default_coupler_model();

/// (lambda, ell_c, ell_0) samples of a wavelength-dependent coupler.
struct CouplerDispersionSample {
    double lambda_nm = 0.0;
    double ell_c_um = 0.0;
    double ell_0_um = 0.0;
};

/// Piecewise-linear interpolation of coupler parameters over wavelength.
/// Derivatives come from the local segment slope.
class CouplerDispersionTable {
  public:
    explicit CouplerDispersionTable(std::vector<CouplerDispersionSample> samples);

    CouplerModel at(double lambda_nm) const;
    const std::vector<CouplerDispersionSample>& samples() const { return samples_; }

  private:
    std::vector<CouplerDispersionSample> samples_;
};

/// Default wavelength-dependent coupler over the 1548-1562 nm band,
/// linearized around the 1554 nm model above.
CouplerDispersionTable default_dispersion_table();

struct SensitivityEntry {
    std::string parameter;
    std::string nominal;    // value with unit, "-" when not applicable
    std::string unit;
    std::string variation;  // signed variation with unit, e.g. "-25 nm"
    double delta_ellc_um = 0.0;
};

/// Fabrication-sensitivity ledger: change of the coupling length for each
/// listed parameter variation, around a stated nominal ell_c.
struct SensitivityLedger {
    std::vector<SensitivityEntry> entries;
    double nominal_ellc_um = 0.0;

    const SensitivityEntry& find(std::string_view parameter) const;  // std::out_of_range
};

/// The bundled ledger (11 rows, nominal ell_c = 37.47 um).
SensitivityLedger builtin_sensitivity_ledger();

SensitivityLedger load_sensitivity_ledger(const std::filesystem::path& csv_path);
void save_sensitivity_ledger(const SensitivityLedger& ledger, const std::filesystem::path& csv_path);

struct SensitivityCombination {
    double delta_ellc_um = 0.0;
    std::optional<double> delta_c;  // set when a design point was supplied
};

/// Linear combination sum(multiplier * coefficient) over ledger rows.
/// When a design point (L_int, model) is given, also chains the result
/// through dC/d(ell_c) at that point.
SensitivityCombination sensitivity_combination(
    const std::vector<std::pair<std::string, double>>& perturbations, const SensitivityLedger& ledger);
SensitivityCombination sensitivity_combination(
    const std::vector<std::pair<std::string, double>>& perturbations, const SensitivityLedger& ledger,
    double l_int_um, const CouplerModel& m);

}  // namespace photonic::components
