#include "photonic/quantum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "photonic/lincircuit.hpp"

namespace photonic::quantum {

namespace {

constexpr int kMaxPhotons = 4;
constexpr std::size_t kMaxModes = 12;
constexpr std::size_t kMaxPermanentDim = 8;

double factorial(int n) {
    double out = 1.0;
    for (int i = 2; i <= n; ++i) out *= i;
    return out;
}

}  // namespace

int FockState::total() const {
    int n = 0;
    for (int occ : occupations) n += occ;
    return n;
}

void FockState::validate() const {
    for (int occ : occupations) {
        if (occ < 0) throw std::domain_error("Fock occupations must be non-negative");
    }
}

void PostSelectionRule::validate(std::size_t n_modes) const {
    std::vector<bool> seen(n_modes, false);
    for (const auto& [a, b] : rails) {
        if (a >= n_modes || b >= n_modes) throw std::invalid_argument("rail mode index out of range");
        if (a == b || seen[a] || seen[b]) throw std::invalid_argument("rail pairs must be disjoint");
        seen[a] = true;
        seen[b] = true;
    }
}

bool PostSelectionRule::accepts(const FockState& s) const {
    std::vector<bool> in_rail(s.occupations.size(), false);
    for (const auto& [a, b] : rails) {
        if (a >= s.occupations.size() || b >= s.occupations.size()) {
            throw std::invalid_argument("rail mode index out of range");
        }
        if (s.occupations[a] + s.occupations[b] != 1) return false;
        in_rail[a] = true;
        in_rail[b] = true;
    }
    for (std::size_t m = 0; m < s.occupations.size(); ++m) {
        if (!in_rail[m] && s.occupations[m] != 0) return false;
    }
    return true;
}

std::complex<double> permanent(const lincircuit::ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw std::domain_error("permanent requires a square matrix");
    const std::size_t n = m.rows();
    if (n > kMaxPermanentDim) throw std::domain_error("permanent limited to dimension 8");
    if (n == 0) return {1.0, 0.0};

    // Ryser: per(A) = (-1)^n sum over nonempty column subsets S of
    // (-1)^{|S|} prod_i sum_{j in S} a_ij, walked in Gray-code order so
    // each step updates the row sums by one column.
    std::vector<std::complex<double>> row_sum(n, {0.0, 0.0});
    std::complex<double> total{0.0, 0.0};
    unsigned prev = 0;
    const unsigned limit = 1u << n;
    for (unsigned k = 1; k < limit; ++k) {
        const unsigned gray = k ^ (k >> 1);
        const unsigned changed = gray ^ prev;
        unsigned j = 0;
        while (!((changed >> j) & 1u)) ++j;
        const double sign_col = (gray & changed) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; ++i) row_sum[i] += sign_col * m(i, j);
        std::complex<double> prod{1.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) prod *= row_sum[i];
        const int bits = std::popcount(gray);
        total += ((n - bits) % 2 == 0 ? 1.0 : -1.0) * prod;
        prev = gray;
    }
    return total;
}

std::complex<double> amplitude(const lincircuit::ComplexMatrix& s, const FockState& input,
                               const FockState& output) {
    if (s.rows() != s.cols()) throw std::domain_error("scattering matrix must be square");
    const std::size_t n_modes = s.rows();
    if (n_modes > kMaxModes) throw std::domain_error("amplitude limited to 12 modes");
    if (input.occupations.size() != n_modes || output.occupations.size() != n_modes) {
        throw std::domain_error("Fock state length must match the matrix dimension");
    }
    input.validate();
    output.validate();
    const int n = input.total();
    if (n != output.total()) throw std::domain_error("photon numbers of input and output must match");
    if (n > kMaxPhotons) throw std::domain_error("amplitude limited to 4 photons");
    if (n == 0) return {1.0, 0.0};

    std::vector<std::size_t> col_modes;
    std::vector<std::size_t> row_modes;
    for (std::size_t m = 0; m < n_modes; ++m) {
        for (int r = 0; r < input.occupations[m]; ++r) col_modes.push_back(m);
        for (int r = 0; r < output.occupations[m]; ++r) row_modes.push_back(m);
    }
    lincircuit::ComplexMatrix sub(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < row_modes.size(); ++r) {
        for (std::size_t c = 0; c < col_modes.size(); ++c) {
            sub(r, c) = s(row_modes[r], col_modes[c]);
        }
    }
    double norm = 1.0;
    for (std::size_t m = 0; m < n_modes; ++m) {
        norm *= factorial(input.occupations[m]) * factorial(output.occupations[m]);
    }
    return permanent(sub) / std::sqrt(norm);
}

namespace {

void enumerate_rec(std::size_t mode, int remaining, std::vector<int>& current,
                   std::vector<FockState>& out) {
    if (mode + 1 == current.size()) {
        current[mode] = remaining;
        out.push_back(FockState{current});
        return;
    }
    for (int occ = remaining; occ >= 0; --occ) {
        current[mode] = occ;
        enumerate_rec(mode + 1, remaining - occ, current, out);
    }
}

}  // namespace

std::vector<FockState> enumerate_fock_states(std::size_t n_modes, int n_photons) {
    if (n_modes == 0) throw std::domain_error("need at least one mode");
    if (n_photons < 0) throw std::domain_error("photon number must be non-negative");
    if (n_photons > kMaxPhotons) throw std::domain_error("enumeration limited to 4 photons");
    if (n_modes > kMaxModes) throw std::domain_error("enumeration limited to 12 modes");
    std::vector<FockState> out;
    std::vector<int> current(n_modes, 0);
    enumerate_rec(0, n_photons, current, out);
    return out;
}

std::vector<std::pair<FockState, double>> evolve_distribution(const lincircuit::ComplexMatrix& s,
                                                              const FockState& input) {
    const int n = input.total();
    std::vector<std::pair<FockState, double>> out;
    for (const FockState& candidate : enumerate_fock_states(s.rows(), n)) {
        const std::complex<double> a = amplitude(s, input, candidate);
        out.emplace_back(candidate, std::norm(a));
    }
    return out;
}

namespace {

struct LogicalLayout {
    std::size_t c1, c0, t1, t0;
};

FockState computational_input(std::size_t n_modes, const LogicalLayout& lay, int control, int target) {
    FockState s{std::vector<int>(n_modes, 0)};
    s.occupations[control == 1 ? lay.c1 : lay.c0] = 1;
    s.occupations[target == 1 ? lay.t1 : lay.t0] = 1;
    return s;
}

/// Maps an accepted outcome to its logical index (control bit, target bit),
/// with bit pairs packed as 2*control + target.
int logical_outcome(const FockState& s, const LogicalLayout& lay) {
    const int control = s.occupations[lay.c1] == 1 ? 1 : 0;
    const int target = s.occupations[lay.t1] == 1 ? 1 : 0;
    return 2 * control + target;
}

}  // namespace

GateReport cnot_report(double c_half, double c_twothirds) {
    if (!(c_half > 0.0 && c_half < 1.0)) throw std::domain_error("c_half must lie in (0, 1)");
    if (!(c_twothirds > 0.0 && c_twothirds < 1.0)) {
        throw std::domain_error("c_twothirds must lie in (0, 1)");
    }
    const lincircuit::Netlist net = lincircuit::cnot_netlist(c_half, c_twothirds);
    const lincircuit::ComplexMatrix s = lincircuit::compile(net);
    const auto logical = lincircuit::cnot_logical_modes();
    const LogicalLayout lay{logical[0], logical[1], logical[2], logical[3]};

    PostSelectionRule rule{{{lay.c1, lay.c0}, {lay.t1, lay.t0}}};
    rule.validate(net.n_modes);

    GateReport report;
    report.c_half = c_half;
    report.c_twothirds = c_twothirds;
    double fidelity_sum = 0.0;
    double success_sum = 0.0;
    for (int control = 0; control <= 1; ++control) {
        for (int target = 0; target <= 1; ++target) {
            const int input_index = 2 * control + target;
            const FockState in = computational_input(net.n_modes, lay, control, target);
            std::array<double, 4> outcome_prob{};
            double p_ps = 0.0;
            for (const auto& [state, prob] : evolve_distribution(s, in)) {
                if (!rule.accepts(state)) continue;
                p_ps += prob;
                outcome_prob[logical_outcome(state, lay)] += prob;
            }
            if (p_ps <= 0.0) {
                throw DegenerateCircuitError("post-selection never succeeds for input " +
                                             std::to_string(control) + std::to_string(target));
            }
            const int expected = 2 * control + (control == 1 ? 1 - target : target);
            report.input_success[input_index] = p_ps;
            for (int o = 0; o < 4; ++o) report.conditional[input_index][o] = outcome_prob[o] / p_ps;
            fidelity_sum += outcome_prob[expected] / p_ps;
            success_sum += p_ps;
        }
    }
    report.fidelity = fidelity_sum / 4.0;
    report.success_prob = success_sum / 4.0;
    return report;
}

double FidelityMap::fidelity_at(std::size_t i_half, std::size_t j_twothirds) const {
    return fidelity.at(i_half * c_twothirds_values.size() + j_twothirds);
}

double FidelityMap::success_at(std::size_t i_half, std::size_t j_twothirds) const {
    return success.at(i_half * c_twothirds_values.size() + j_twothirds);
}

namespace {

/// Inclusive linspace with the sample nearest `snap` replaced by `snap`
/// itself when it lies inside [lo, hi]. Returns the snapped index.
std::optional<std::size_t> build_axis(double lo, double hi, std::size_t n, double snap,
                                      std::vector<double>& out) {
    if (!(n >= 2)) throw std::domain_error("grid needs at least 2 samples per axis");
    if (!(lo < hi)) throw std::domain_error("grid range must be increasing");
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    if (snap < lo || snap > hi) return std::nullopt;
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(out[i] - snap) < std::abs(out[nearest] - snap)) nearest = i;
    }
    out[nearest] = snap;
    return nearest;
}

std::size_t nearest_index(const std::vector<double>& axis, double value) {
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (std::abs(axis[i] - value) < std::abs(axis[nearest] - value)) nearest = i;
    }
    return nearest;
}

}  // namespace

FidelityMap fidelity_map(const FidelityMapOptions& options) {
    constexpr double kIdealHalf = 0.5;
    constexpr double kIdealTwoThirds = 2.0 / 3.0;
    if (!(options.c_half_min > 0.0 && options.c_half_max < 1.0 &&
          options.c_twothirds_min > 0.0 && options.c_twothirds_max < 1.0)) {
        throw std::domain_error("grid must lie strictly inside (0, 1) on both axes");
    }
    FidelityMap map;
    const auto ideal_i =
        build_axis(options.c_half_min, options.c_half_max, options.n_half, kIdealHalf, map.c_half_values);
    const auto ideal_j = build_axis(options.c_twothirds_min, options.c_twothirds_max,
                                    options.n_twothirds, kIdealTwoThirds, map.c_twothirds_values);
    if (ideal_i && ideal_j) map.ideal_cell = std::make_pair(*ideal_i, *ideal_j);
    if (options.fitted_point) {
        map.fitted_cell = std::make_pair(nearest_index(map.c_half_values, options.fitted_point->first),
                                         nearest_index(map.c_twothirds_values, options.fitted_point->second));
    }
    map.fidelity.resize(options.n_half * options.n_twothirds);
    map.success.resize(options.n_half * options.n_twothirds);
    for (std::size_t i = 0; i < options.n_half; ++i) {
        for (std::size_t j = 0; j < options.n_twothirds; ++j) {
            const std::size_t cell = i * options.n_twothirds + j;
            try {
                const GateReport r = cnot_report(map.c_half_values[i], map.c_twothirds_values[j]);
                map.fidelity[cell] = r.fidelity;
                map.success[cell] = r.success_prob;
            } catch (const DegenerateCircuitError&) {
                map.fidelity[cell] = std::numeric_limits<double>::quiet_NaN();
                map.success[cell] = std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    return map;
}

void write_fidelity_map_csv(const FidelityMap& map, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write fidelity map: " + csv_path.string());
    out.precision(12);
    out << "C_half,C_twothirds,fidelity,success_prob\n";
    for (std::size_t i = 0; i < map.c_half_values.size(); ++i) {
        for (std::size_t j = 0; j < map.c_twothirds_values.size(); ++j) {
            out << map.c_half_values[i] << ',' << map.c_twothirds_values[j] << ','
                << map.fidelity_at(i, j) << ',' << map.success_at(i, j) << "\n";
        }
    }
}

}  // namespace photonic::quantum
