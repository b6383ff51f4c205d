#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "photonic/calib.hpp"

namespace photonic::calib {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_to_half_open_pi(double x) {
    double y = std::fmod(x + kPi, 2.0 * kPi);
    if (y <= 0.0) y += 2.0 * kPi;
    return y - kPi;
}

double fringe_model(double lambda_nm, double offset, double amplitude, double lambda_max,
                    double period) {
    return offset + amplitude * std::cos(2.0 * kPi * (lambda_nm - lambda_max) / period);
}

}  // namespace

BsPhaseResult extract_bs_phase(const SweepDataset& left, const SweepDataset& right,
                               const MziPhaseOptions& options) {
    const SweepDataset l = left.to_linear();
    const SweepDataset r = right.to_linear();
    l.validate();
    r.validate();
    if (l.samples.size() < 8 || r.samples.size() < 8) {
        throw std::invalid_argument("fringe fitting needs at least 8 samples per output");
    }

    const PeriodEstimate pl = estimate_dominant_period(l.samples);
    const PeriodEstimate pr = estimate_dominant_period(r.samples);
    const double period_init = 0.5 * (pl.period_nm + pr.period_nm);
    const double span_l = l.max_wavelength() - l.min_wavelength();
    const double span_r = r.max_wavelength() - r.min_wavelength();
    if (span_l < 2.0 * period_init || span_r < 2.0 * period_init) {
        throw std::domain_error("each output must span at least two fringe periods");
    }

    const auto residuals = [&l, &r](const std::vector<double>& p) {
        // p: period, lambda_max_left, lambda_max_right, A_l, B_l, A_r, B_r
        std::vector<double> res(l.samples.size() + r.samples.size());
        if (p[0] <= 0.0) {
            std::fill(res.begin(), res.end(), std::numeric_limits<double>::quiet_NaN());
            return res;
        }
        std::size_t k = 0;
        for (const auto& s : l.samples) {
            res[k++] = fringe_model(s.wavelength_nm, p[3], p[4], p[1], p[0]) - s.value;
        }
        for (const auto& s : r.samples) {
            res[k++] = fringe_model(s.wavelength_nm, p[5], p[6], p[2], p[0]) - s.value;
        }
        return res;
    };
    FitResult fit = least_squares(
        residuals,
        {period_init, pl.phase_max_nm, pr.phase_max_nm, pl.mean, pl.amplitude, pr.mean, pr.amplitude},
        {"period_nm", "lambda_max_left_nm", "lambda_max_right_nm", "offset_left", "amplitude_left",
         "offset_right", "amplitude_right"},
        options.engine);
    auto& p = fit.parameters;

    // Canonical form: positive amplitudes (a negative one is half a period
    // of peak shift) and peak positions inside the first period of the data.
    const double period = p[0];
    for (const auto [amp_idx, max_idx, lo] :
         {std::tuple{4, 1, l.min_wavelength()}, std::tuple{6, 2, r.min_wavelength()}}) {
        if (p[amp_idx] < 0.0) {
            p[amp_idx] = -p[amp_idx];
            p[max_idx] += 0.5 * period;
        }
        p[max_idx] -= std::floor((p[max_idx] - lo) / period) * period;
    }

    for (const auto [amp_idx, off_idx, side] : {std::tuple{4, 3, "left"}, std::tuple{6, 5, "right"}}) {
        if (!(p[off_idx] > 0.0) || p[amp_idx] / p[off_idx] < options.contrast_threshold) {
            throw LowContrastError(std::string("fringe contrast too low on the ") + side + " output");
        }
    }

    BsPhaseResult out;
    out.fringes = MziFringeFit{
        .period_nm = p[0],
        .lambda_max_left_nm = p[1],
        .lambda_max_right_nm = p[2],
        .offset_left = p[3],
        .amplitude_left = p[4],
        .offset_right = p[5],
        .amplitude_right = p[6],
    };
    out.phase_rad = wrap_to_half_open_pi(2.0 * kPi * (p[1] - p[2]) / period);
    out.fit = std::move(fit);
    return out;
}

}  // namespace photonic::calib
