#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "photonic/complex_matrix.hpp"

// Few-photon Fock-state evolution through a compiled circuit: permanents,
// transition amplitudes, output distributions, the post-selected CNOT
// truth-table report, and the fidelity map over the two splitting ratios.
namespace photonic::quantum {

struct FockState {
    std::vector<int> occupations;

    int total() const;
    void validate() const;  // throws std::domain_error on negative entries
    bool operator==(const FockState&) const = default;
};

/// Accepts outcomes with exactly one photon per rail pair and no photons
/// anywhere else.
struct PostSelectionRule {
    std::vector<std::pair<std::size_t, std::size_t>> rails;

    void validate(std::size_t n_modes) const;  // disjoint, in range
    bool accepts(const FockState& s) const;
};

/// Raised when post-selection never succeeds for some computational input,
/// so a conditional distribution cannot be formed.
struct DegenerateCircuitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Matrix permanent by Ryser-style inclusion-exclusion. Exact in double
/// precision at the sizes allowed here (dimension <= 8).
std::complex<double> permanent(const lincircuit::ComplexMatrix& m);

/// <output| U |input> for indistinguishable photons through scattering
/// matrix S: per(S_sub)/sqrt(prod in_i! prod out_j!), where S_sub repeats
/// column j input_j times and row i output_i times.
std::complex<double> amplitude(const lincircuit::ComplexMatrix& s, const FockState& input,
                               const FockState& output);

/// All Fock states of n_photons photons over n_modes modes, in a fixed
/// deterministic order (occupancy drains from the lowest mode index first).
std::vector<FockState> enumerate_fock_states(std::size_t n_modes, int n_photons);

/// |amplitude|^2 over every output Fock state with the input's photon
/// number, in enumerate_fock_states order. Sums to 1 for unitary S.
std::vector<std::pair<FockState, double>> evolve_distribution(const lincircuit::ComplexMatrix& s,
                                                              const FockState& input);

/// Truth-table report of the post-selected CNOT. Inputs and outcomes are
/// indexed 0..3 as bit pairs (control, target): 00, 01, 10, 11.
struct GateReport {
    double c_half = 0.0;
    double c_twothirds = 0.0;
    double fidelity = 0.0;      // mean over inputs of P(correct | post-selected)
    double success_prob = 0.0;  // mean over inputs of P(post-selected)
    std::array<double, 4> input_success{};
    std::array<std::array<double, 4>, 4> conditional{};  // [input][outcome]
};

/// Evolves the four computational inputs through the compiled CNOT circuit
/// built from the given splitting ratios and post-selects on one photon
/// per qubit rail pair.
GateReport cnot_report(double c_half, double c_twothirds);

struct FidelityMapOptions {
    double c_half_min = 0.4;
    double c_half_max = 0.6;
    double c_twothirds_min = 0.55;
    double c_twothirds_max = 0.78;
    std::size_t n_half = 100;
    std::size_t n_twothirds = 100;
    /// Extra marker, e.g. a fitted device point; nearest cell is flagged.
    std::optional<std::pair<double, double>> fitted_point;
};

/// Gridded fidelity and success probability over the two splitting ratios.
/// The grid sample nearest the ideal point (0.5, 2/3) is snapped onto it
/// exactly when the ideal value lies inside the requested range, so the
/// unit-fidelity optimum is always a grid cell of an enclosing map.
struct FidelityMap {
    std::vector<double> c_half_values;
    std::vector<double> c_twothirds_values;
    std::vector<double> fidelity;  // row-major [i_half * n_twothirds + j]
    std::vector<double> success;   // same layout
    std::optional<std::pair<std::size_t, std::size_t>> ideal_cell;
    std::optional<std::pair<std::size_t, std::size_t>> fitted_cell;

    double fidelity_at(std::size_t i_half, std::size_t j_twothirds) const;
    double success_at(std::size_t i_half, std::size_t j_twothirds) const;
};

/// Cells where cnot_report degenerates carry NaN instead of aborting the
/// map (cannot happen for ratios strictly inside (0,1)).
FidelityMap fidelity_map(const FidelityMapOptions& options);

/// One `C_half,C_twothirds,fidelity,success_prob` row per cell.
void write_fidelity_map_csv(const FidelityMap& map, const std::filesystem::path& csv_path);

}  // namespace photonic::quantum
