#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "photonic/calib.hpp"

namespace photonic::calib {

namespace {

constexpr double kPi = std::numbers::pi;

/// Demeaned complex tone sum at one frequency (cycles per nm).
std::complex<double> tone_sum(const std::vector<SweepSample>& samples, double mean, double freq) {
    std::complex<double> z{0.0, 0.0};
    for (const auto& s : samples) {
        const double arg = -2.0 * kPi * freq * s.wavelength_nm;
        z += (s.value - mean) * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return z;
}

}  // namespace

PeriodEstimate estimate_dominant_period(const std::vector<SweepSample>& samples) {
    if (samples.size() < 4) throw std::invalid_argument("period estimation needs at least 4 samples");
    const double span = samples.back().wavelength_nm - samples.front().wavelength_nm;
    if (!(span > 0.0)) throw std::domain_error("samples must span a positive wavelength range");
    double min_spacing = span;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        min_spacing = std::min(min_spacing, samples[i].wavelength_nm - samples[i - 1].wavelength_nm);
    }
    double mean = 0.0;
    for (const auto& s : samples) mean += s.value;
    mean /= static_cast<double>(samples.size());

    // Coarse scan up to half the sample-limited bandwidth (capped to keep
    // the scan cheap on dense sweeps), then two 10x refinements.
    const double f_lo = 0.5 / span;
    const double f_hi = std::min(0.5 / min_spacing, 50.0 / span);
    double best_f = f_lo;
    double best_power = -1.0;
    const int coarse = 500;
    for (int i = 0; i <= coarse; ++i) {
        const double f = f_lo + (f_hi - f_lo) * static_cast<double>(i) / coarse;
        const double power = std::norm(tone_sum(samples, mean, f));
        if (power > best_power) {
            best_power = power;
            best_f = f;
        }
    }
    double width = (f_hi - f_lo) / coarse;
    for (int level = 0; level < 2; ++level) {
        const double center = best_f;
        for (int i = -10; i <= 10; ++i) {
            const double f = center + width * static_cast<double>(i) / 10.0;
            if (f <= 0.0) continue;
            const double power = std::norm(tone_sum(samples, mean, f));
            if (power > best_power) {
                best_power = power;
                best_f = f;
            }
        }
        width /= 10.0;
    }

    const std::complex<double> z = tone_sum(samples, mean, best_f);
    PeriodEstimate out;
    out.period_nm = 1.0 / best_f;
    out.mean = mean;
    out.amplitude = 2.0 * std::abs(z) / static_cast<double>(samples.size());
    // z ~ (n amplitude / 2) exp(-2 pi i f lambda_max), so the cosine peak
    // sits at -arg(z) / (2 pi f); reduce it into the first period.
    double peak = -std::arg(z) / (2.0 * kPi * best_f);
    const double lo = samples.front().wavelength_nm;
    peak -= std::floor((peak - lo) / out.period_nm) * out.period_nm;
    out.phase_max_nm = peak;
    return out;
}

namespace {

double ring_model(double lambda_nm, const double* p) {
    // p: lambda0, w_c, w_int, T0, F_c, lambda_fp, fsr_fp
    const double s = std::sin(kPi * (lambda_nm - p[5]) / p[6]);
    const double background = p[3] / (1.0 + p[4] * s * s);
    const double half_sum = 0.5 * (p[1] + p[2]);
    const double det = lambda_nm - p[0];
    return background * (1.0 - p[1] * p[2] / (half_sum * half_sum + det * det));
}

}  // namespace

RingFit fit_ring(const SweepDataset& data, double window_min_nm, double window_max_nm,
                 const RingFitOptions& options) {
    const SweepDataset linear = data.to_linear();
    linear.validate();
    std::vector<SweepSample> win;
    for (const auto& s : linear.samples) {
        if (s.wavelength_nm >= window_min_nm && s.wavelength_nm <= window_max_nm) win.push_back(s);
    }
    if (win.size() < 10) throw std::invalid_argument("resonance window holds fewer than 10 samples");

    std::size_t min_idx = 0;
    for (std::size_t i = 1; i < win.size(); ++i) {
        if (win[i].value < win[min_idx].value) min_idx = i;
    }
    const double lambda0 = win[min_idx].wavelength_nm;
    const double t_min = win[min_idx].value;

    // Rough background from the outer 10% of the window on each side.
    const std::size_t edge = std::max<std::size_t>(win.size() / 10, 2);
    double t0_rough = 0.0;
    for (std::size_t i = 0; i < edge; ++i) t0_rough += win[i].value + win[win.size() - 1 - i].value;
    t0_rough /= static_cast<double>(2 * edge);
    const double depth = t0_rough - t_min;
    if (!(t0_rough > 0.0) || depth < options.dip_threshold * t0_rough) {
        throw NoResonanceError("no transmission dip above threshold in the fit window");
    }

    // Half-depth crossings around the minimum give the width guess.
    const double half_level = t_min + 0.5 * depth;
    double left = win.front().wavelength_nm;
    for (std::size_t i = min_idx; i-- > 0;) {
        if (win[i].value >= half_level) {
            const double f = (half_level - win[i].value) / (win[i + 1].value - win[i].value);
            left = win[i].wavelength_nm + f * (win[i + 1].wavelength_nm - win[i].wavelength_nm);
            break;
        }
    }
    double right = win.back().wavelength_nm;
    for (std::size_t i = min_idx + 1; i < win.size(); ++i) {
        if (win[i].value >= half_level) {
            const double f = (half_level - win[i - 1].value) / (win[i].value - win[i - 1].value);
            right = win[i - 1].wavelength_nm + f * (win[i].wavelength_nm - win[i - 1].wavelength_nm);
            break;
        }
    }
    double fwhm = right - left;
    const double spacing = (win.back().wavelength_nm - win.front().wavelength_nm) /
                           static_cast<double>(win.size() - 1);
    if (!(fwhm > 0.0)) fwhm = 4.0 * spacing;

    // Fringe guesses from the off-resonant background.
    std::vector<SweepSample> background;
    for (const auto& s : win) {
        if (std::abs(s.wavelength_nm - lambda0) > options.exclude_fwhm_mult * fwhm) {
            background.push_back(s);
        }
    }
    double t0_init = t0_rough;
    double fc_init = 1e-3;
    double lambda_fp_init = lambda0;
    double fsr_fp_init = win.back().wavelength_nm - win.front().wavelength_nm;
    if (background.size() >= 8) {
        double bg_max = background.front().value;
        double bg_min = background.front().value;
        for (const auto& s : background) {
            bg_max = std::max(bg_max, s.value);
            bg_min = std::min(bg_min, s.value);
        }
        t0_init = bg_max;
        if (bg_min > 0.0 && bg_max > bg_min) fc_init = std::max(bg_max / bg_min - 1.0, 1e-4);
        const PeriodEstimate fringe = estimate_dominant_period(background);
        if (fringe.amplitude > 1e-6 * t0_init) {
            fsr_fp_init = fringe.period_nm;
            lambda_fp_init = fringe.phase_max_nm;
        }
    }

    // Split the width guess into the two linewidths using the relative
    // depth: d0 = 4 w_c w_int/(w_c + w_int)^2 and FWHM = w_c + w_int.
    const double s_fringe = std::sin(kPi * (lambda0 - lambda_fp_init) / fsr_fp_init);
    const double bg_at_dip = t0_init / (1.0 + fc_init * s_fringe * s_fringe);
    double d0 = (bg_at_dip - t_min) / bg_at_dip;
    d0 = std::clamp(d0, 1e-3, 1.0);
    const double root = std::sqrt(1.0 - d0 + 1e-15);
    double wc_init = 0.5 * fwhm * (1.0 + root);
    double wint_init = 0.5 * fwhm * (1.0 - root);
    wint_init = std::max(wint_init, 0.05 * fwhm);

    const auto residuals = [&win](const std::vector<double>& p) {
        std::vector<double> r(win.size());
        if (p[6] <= 0.0 || p[3] <= 0.0) {
            std::fill(r.begin(), r.end(), std::numeric_limits<double>::quiet_NaN());
            return r;
        }
        for (std::size_t i = 0; i < win.size(); ++i) {
            r[i] = ring_model(win[i].wavelength_nm, p.data()) - win[i].value;
        }
        return r;
    };
    FitResult fit = least_squares(
        residuals, {lambda0, wc_init, wint_init, t0_init, fc_init, lambda_fp_init, fsr_fp_init},
        {"lambda0_nm", "w_c_nm", "w_int_nm", "T0", "F_c", "lambda_fp_nm", "fsr_fp_nm"},
        options.engine);

    // Canonical form: positive linewidths with w_c the larger of the pair,
    // and the fringe reference within half a period of the resonance.
    auto& p = fit.parameters;
    if (p[1] + p[2] < 0.0) {
        p[1] = -p[1];
        p[2] = -p[2];
    }
    if (p[2] > p[1]) {
        std::swap(p[1], p[2]);
        std::swap(fit.uncertainties[1], fit.uncertainties[2]);
    }
    if (std::abs(p[4]) < 1e-12) p[4] = std::abs(p[4]);
    p[5] -= std::round((p[5] - p[0]) / p[6]) * p[6];

    RingFit out;
    out.fit = std::move(fit);
    out.params = components::RingParams{
        .lambda0_nm = out.fit.parameters[0],
        .w_int_nm = out.fit.parameters[2],
        .w_c_nm = out.fit.parameters[1],
        .T0 = out.fit.parameters[3],
        .F_c = out.fit.parameters[4],
        .lambda_fp_nm = out.fit.parameters[5],
        .fsr_fp_nm = out.fit.parameters[6],
    };
    return out;
}

RingFit fit_ring(const SweepDataset& data, const RingFitOptions& options) {
    data.validate();
    return fit_ring(data, data.min_wavelength(), data.max_wavelength(), options);
}

LinewidthAssignment disambiguate_linewidths(const std::vector<LinewidthObservation>& observations) {
    const std::size_t n = observations.size();
    if (n < 2) throw std::invalid_argument("disambiguation needs at least 2 devices");
    if (n > 20) throw std::invalid_argument("exhaustive disambiguation limited to 20 devices");
    for (const auto& o : observations) {
        if (!(o.w_a_nm > 0.0) || !(o.w_b_nm > 0.0)) {
            throw std::domain_error("linewidths must be positive");
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return observations[a].gap_nm < observations[b].gap_nm;
    });
    if (observations[order.front()].gap_nm == observations[order.back()].gap_nm) {
        throw std::invalid_argument("disambiguation needs at least 2 distinct gaps");
    }

    const auto w_c_of = [&](std::size_t device, unsigned long mask) {
        return ((mask >> device) & 1ul) ? observations[device].w_a_nm : observations[device].w_b_nm;
    };
    const auto w_int_of = [&](std::size_t device, unsigned long mask) {
        return ((mask >> device) & 1ul) ? observations[device].w_b_nm : observations[device].w_a_nm;
    };
    const auto is_monotone = [&](unsigned long mask) {
        // w_c must be non-increasing as the gap grows; devices sharing a
        // gap are unordered among themselves but bound the next gap by
        // their smallest w_c.
        double bound = std::numeric_limits<double>::infinity();
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            double group_min = std::numeric_limits<double>::infinity();
            while (j < n && observations[order[j]].gap_nm == observations[order[i]].gap_nm) {
                const double wc = w_c_of(order[j], mask);
                if (wc > bound * (1.0 + 1e-12)) return false;
                group_min = std::min(group_min, wc);
                ++j;
            }
            bound = group_min;
            i = j;
        }
        return true;
    };
    const auto variance_of = [&](unsigned long mask) {
        double mean = 0.0;
        for (std::size_t d = 0; d < n; ++d) mean += w_int_of(d, mask);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const double dev = w_int_of(d, mask) - mean;
            var += dev * dev;
        }
        return var / static_cast<double>(n);
    };

    unsigned long best_monotone = 0;
    double best_monotone_var = std::numeric_limits<double>::infinity();
    unsigned long best_any = 0;
    double best_any_var = std::numeric_limits<double>::infinity();
    const unsigned long limit = 1ul << n;
    for (unsigned long mask = 0; mask < limit; ++mask) {
        const double var = variance_of(mask);
        if (var < best_any_var) {
            best_any_var = var;
            best_any = mask;
        }
        if (var < best_monotone_var && is_monotone(mask)) {
            best_monotone_var = var;
            best_monotone = mask;
        }
    }

    LinewidthAssignment out;
    out.monotonic = std::isfinite(best_monotone_var);
    const unsigned long chosen = out.monotonic ? best_monotone : best_any;
    if (!out.monotonic) {
        out.warning = "no labeling keeps w_c non-increasing in gap; reporting the best-variance one";
    }
    out.assigned.resize(n);
    double mean = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        out.assigned[d] = {w_c_of(d, chosen), w_int_of(d, chosen)};
        mean += w_int_of(d, chosen);
    }
    out.mean_w_int_nm = mean / static_cast<double>(n);
    return out;
}

}  // namespace photonic::calib
