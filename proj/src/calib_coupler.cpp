#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "photonic/calib.hpp"

namespace photonic::calib {

namespace {

constexpr double kPi = std::numbers::pi;

double sweep_model(double l_um, double ell_c, double ell_0) {
    const double s = std::sin(0.5 * kPi * (l_um + ell_0) / ell_c);
    return s * s;
}

}  // namespace

CouplerSweepFit fit_coupler_sweep(const std::vector<CouplerSweepPoint>& points, double lambda_nm,
                                  std::optional<components::CouplerModel> initial,
                                  const FitOptions& engine) {
    if (!(lambda_nm > 0.0)) throw std::domain_error("lambda_nm must be positive");
    std::set<double> distinct;
    double c_min = std::numeric_limits<double>::infinity();
    double c_max = -std::numeric_limits<double>::infinity();
    double l_min = std::numeric_limits<double>::infinity();
    double l_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        if (!std::isfinite(p.l_int_um) || !std::isfinite(p.cross)) {
            throw std::domain_error("sweep points must be finite");
        }
        if (p.l_int_um < 0.0) throw std::domain_error("interaction lengths must be non-negative");
        if (p.cross < 0.0 || p.cross > 1.0) throw std::domain_error("splitting ratios must lie in [0, 1]");
        distinct.insert(p.l_int_um);
        c_min = std::min(c_min, p.cross);
        c_max = std::max(c_max, p.cross);
        l_min = std::min(l_min, p.l_int_um);
        l_max = std::max(l_max, p.l_int_um);
    }
    if (distinct.size() < 3) throw std::invalid_argument("need at least 3 distinct interaction lengths");
    if (c_max - c_min < 1e-12) {
        throw NonIdentifiableError("all splitting ratios equal; cannot identify the coupler model");
    }

    double ellc_init;
    double ell0_init;
    if (initial) {
        initial->validate();
        ellc_init = initial->ell_c_um;
        ell0_init = initial->ell_0_um;
    } else {
        // Deterministic coarse grid; the span bounds the plausible period.
        const double span = l_max - l_min;
        double best_ssr = std::numeric_limits<double>::infinity();
        ellc_init = span;
        ell0_init = 0.0;
        const int n_c = 80;
        const int n_0 = 60;
        for (int i = 0; i <= n_c; ++i) {
            const double ell_c = span / 3.0 + (4.0 * span - span / 3.0) * static_cast<double>(i) / n_c;
            for (int j = 0; j <= n_0; ++j) {
                const double ell_0 = ell_c * static_cast<double>(j) / n_0;
                double ssr = 0.0;
                for (const auto& p : points) {
                    const double d = sweep_model(p.l_int_um, ell_c, ell_0) - p.cross;
                    ssr += d * d;
                }
                if (ssr < best_ssr) {
                    best_ssr = ssr;
                    ellc_init = ell_c;
                    ell0_init = ell_0;
                }
            }
        }
    }

    const auto residuals = [&points](const std::vector<double>& p) {
        std::vector<double> r(points.size());
        if (p[0] <= 0.0) {
            std::fill(r.begin(), r.end(), std::numeric_limits<double>::quiet_NaN());
            return r;
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            r[i] = sweep_model(points[i].l_int_um, p[0], p[1]) - points[i].cross;
        }
        return r;
    };
    CouplerSweepFit out;
    out.fit = least_squares(residuals, {ellc_init, ell0_init}, {"ell_c_um", "ell_0_um"}, engine);
    out.lambda_nm = lambda_nm;
    out.model = components::CouplerModel{
        .ell_c_um = out.fit.parameters[0],
        .ell_0_um = out.fit.parameters[1],
        .dell_c_dlambda = 0.0,
        .dell_0_dlambda = 0.0,
    };
    out.model.validate();
    return out;
}

}  // namespace photonic::calib
