#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "photonic/complex_matrix.hpp"

// Scattering-matrix algebra for feed-forward photonic circuits: two-mode
// coupler matrices, stage-ordered netlists, compilation to an NxN unitary,
// and port reduction.
namespace photonic::lincircuit {

/// Two-mode directional coupler with cross-over power ratio C.
/// Cross amplitude convention is +i*sqrt(C); the through amplitude
/// sqrt(1-C) is real and nonnegative.
struct CouplerSpec {
    double cross_ratio = 0.0;
    std::size_t mode_a = 0;
    std::size_t mode_b = 0;
};

struct PhaseShiftSpec {
    std::size_t mode = 0;
    double phase = 0.0;  // radians, applied as exp(+i*phase)
};

using StageElement = std::variant<CouplerSpec, PhaseShiftSpec>;
using Stage = std::vector<StageElement>;

/// Ordered stages of couplers and phase shifts on n_modes waveguides.
/// Stages are applied in propagation order; within a stage all elements
/// act on pairwise-disjoint modes.
struct Netlist {
    std::size_t n_modes = 0;
    std::vector<Stage> stages;
    std::vector<std::string> port_labels;  // empty, or one label per mode

    /// Throws std::invalid_argument on overlapping modes within a stage,
    /// out-of-range mode indices, or a label list of the wrong length;
    /// std::domain_error on a cross ratio outside [0,1] or non-finite phase.
    void validate() const;

    std::size_t mode_index(std::string_view label) const;  // std::out_of_range if unknown
};

ComplexMatrix coupler_matrix(const CouplerSpec& spec);

/// Product of the stage matrices in propagation order. The result of a
/// valid netlist is unitary to 1e-12.
ComplexMatrix compile(const Netlist& netlist);

/// Sub-matrix S'[a][b] = S[outputs[a], inputs[b]]. Not generally unitary.
ComplexMatrix reduce_ports(const ComplexMatrix& S, const std::vector<std::size_t>& inputs,
                           const std::vector<std::size_t>& outputs);

/// Post-selected CNOT circuit on six modes. Mode order is
/// (anc_a, c1, c0, t1, t0, anc_b): the splitter pair C=1/2 sandwiches the
/// central stage, where c0 meets t1 at one C=2/3 coupler and c1, t0 each
/// meet an ancilla at their own C=2/3 coupler.
Netlist cnot_netlist(double c_half = 0.5, double c_twothirds = 2.0 / 3.0);

/// Logical port indices (c1, c0, t1, t0) of cnot_netlist.
std::vector<std::size_t> cnot_logical_modes();

nlohmann::json to_json(const Netlist& netlist);
Netlist netlist_from_json(const nlohmann::json& j);

}  // namespace photonic::lincircuit
