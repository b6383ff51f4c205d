#include <algorithm>
#include <cmath>
#include <limits>

#include "photonic/calib.hpp"
#include "photonic/lincircuit.hpp"

namespace photonic::calib {

TransmissionMatrix cnot_transmission_model(double c_half, double c_twothirds) {
    const lincircuit::Netlist net = lincircuit::cnot_netlist(c_half, c_twothirds);
    const lincircuit::ComplexMatrix full = lincircuit::compile(net);
    const auto logical_array = lincircuit::cnot_logical_modes();
    const std::vector<std::size_t> logical(logical_array.begin(), logical_array.end());
    const lincircuit::ComplexMatrix sub = lincircuit::reduce_ports(full, logical, logical);
    TransmissionMatrix out{};
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) out[r][c] = std::norm(sub(r, c));
    }
    return out;
}

CnotTransmissionFit fit_cnot_transmission(const TransmissionMatrix& measured,
                                          const FitOptions& engine) {
    for (const auto& row : measured) {
        for (double v : row) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                throw std::domain_error("measured transmissions must lie in [0, 1]");
            }
        }
    }

    const auto residuals = [&measured](const std::vector<double>& p) {
        std::vector<double> r(16);
        if (!(p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0)) {
            std::fill(r.begin(), r.end(), std::numeric_limits<double>::quiet_NaN());
            return r;
        }
        const TransmissionMatrix model = cnot_transmission_model(p[0], p[1]);
        std::size_t k = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) r[k++] = model[i][j] - measured[i][j];
        }
        return r;
    };

    // Deterministic coarse grid keeps the two-parameter fit out of the
    // wrong period of the underlying sin^2 couplers.
    double best_h = 0.5;
    double best_g = 2.0 / 3.0;
    double best_ssr = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            const double h = 0.30 + 0.05 * i;
            const double g = 0.45 + 0.05 * j;
            const std::vector<double> r = residuals({h, g});
            double ssr = 0.0;
            for (double v : r) ssr += v * v;
            if (ssr < best_ssr) {
                best_ssr = ssr;
                best_h = h;
                best_g = g;
            }
        }
    }

    CnotTransmissionFit out;
    out.fit = least_squares(residuals, {best_h, best_g}, {"c_half", "c_twothirds"}, engine);
    out.model_matrix = cnot_transmission_model(out.fit.parameters[0], out.fit.parameters[1]);
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            abs_sum += std::abs(out.model_matrix[i][j] - measured[i][j]);
        }
    }
    out.mean_abs_deviation = abs_sum / 16.0;
    return out;
}

}  // namespace photonic::calib
