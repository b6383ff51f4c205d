#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <tuple>

#include "photonic/components.hpp"
#include "photonic/units.hpp"

using namespace photonic;
using namespace photonic::components;

namespace {
const std::filesystem::path kDataDir{PHOTONIC_DATA_DIR};
}

TEST_CASE("unit helpers") {
    CHECK(units::nm_per_um == doctest::Approx(1e3));
    CHECK(units::nm_per_cm == doctest::Approx(1e7));
    CHECK(units::um_per_cm == doctest::Approx(1e4));
    CHECK(units::db_from_linear(0.1) == doctest::Approx(-10.0));
    CHECK(units::linear_from_db(-10.0) == doctest::Approx(0.1));
    CHECK(units::linear_from_db(units::db_from_linear(0.34)) == doctest::Approx(0.34));
    CHECK(units::db_per_cm_from_alpha(1.0) == doctest::Approx(10.0 / std::log(10.0)));
}

TEST_CASE("ring transmission formula") {
    RingParams p{.lambda0_nm = 1552.0,
                 .w_int_nm = 0.006,
                 .w_c_nm = 0.020,
                 .T0 = 0.9,
                 .F_c = 0.0,
                 .lambda_fp_nm = 1552.0,
                 .fsr_fp_nm = 1.0};
    p.validate();
    const double fwhm = p.w_c_nm + p.w_int_nm;
    const double d0 = 4.0 * p.w_c_nm * p.w_int_nm / (fwhm * fwhm);
    // On resonance the dip reaches T0 (1 - d0); at +/- FWHM/2 it is half as
    // deep. The half-depth checks lose a few digits to the cancellation in
    // (lambda - lambda0) at this wavelength scale.
    CHECK(ring_transmission(1552.0, p) == doctest::Approx(p.T0 * (1.0 - d0)).epsilon(1e-12));
    CHECK(ring_transmission(1552.0 + fwhm / 2.0, p) ==
          doctest::Approx(p.T0 * (1.0 - d0 / 2.0)).epsilon(1e-9));
    CHECK(ring_transmission(1552.0 - fwhm / 2.0, p) ==
          doctest::Approx(p.T0 * (1.0 - d0 / 2.0)).epsilon(1e-9));
    // Off resonance the background fringe takes over.
    p.F_c = 0.3;
    const double far = 1552.0 + 0.25;  // quarter period of the fringe: sin^2 = 1/2
    CHECK(ring_transmission(far, p) ==
          doctest::Approx(p.T0 / (1.0 + 0.3 * 0.5) *
                          (1.0 - p.w_c_nm * p.w_int_nm / (fwhm * fwhm / 4.0 + 0.0625)))
              .epsilon(1e-9));
}

TEST_CASE("ring parameter validation") {
    RingParams p{.lambda0_nm = 1552.0,
                 .w_int_nm = -1.0,
                 .w_c_nm = 0.02,
                 .T0 = 0.9,
                 .F_c = 0.3,
                 .lambda_fp_nm = 1551.8,
                 .fsr_fp_nm = 0.8};
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.w_int_nm = 0.006;
    p.T0 = -0.1;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.T0 = 0.9;
    p.fsr_fp_nm = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
}

TEST_CASE("group index from radius and free spectral range") {
    const RingGeometry g{.radius_um = 55.0, .fsr_nm = 3.465};
    CHECK(group_index(g, 1550.0) == doctest::Approx(2.006400).epsilon(1e-5));
}

TEST_CASE("intrinsic quality factor") {
    CHECK(intrinsic_q(1552.0, 0.00665) == doctest::Approx(233383.46).epsilon(1e-6));
}

TEST_CASE("propagation loss chain") {
    const PropagationLoss a = propagation_loss(1.9936, 2.33e5, 1550.0);
    CHECK(a.alpha_per_cm == doctest::Approx(0.346841).epsilon(1e-5));
    CHECK(a.alpha_db_per_cm == doctest::Approx(1.506311).epsilon(1e-5));
    const PropagationLoss b = propagation_loss(1.9936, intrinsic_q(1552.0, 0.00665), 1552.0);
    CHECK(b.alpha_per_cm == doctest::Approx(0.345825).epsilon(1e-5));
    CHECK(b.alpha_db_per_cm == doctest::Approx(1.501898).epsilon(1e-5));
}

TEST_CASE("cross power at reference lengths") {
    const CouplerModel m{.ell_c_um = 33.7, .ell_0_um = 8.2};
    CHECK(cross_power(8.5, m) == doctest::Approx(0.4930086).epsilon(1e-6));
    CHECK(cross_power(12.4, m) == doctest::Approx(0.6712534).epsilon(1e-6));
    CHECK(cross_power(0.0, m) == doctest::Approx(0.1391091).epsilon(1e-6));
}

TEST_CASE("cross power is periodic in the interaction length and bounded") {
    const CouplerModel m{.ell_c_um = 33.7, .ell_0_um = 8.2};
    for (int i = 0; i <= 40; ++i) {
        const double l = 1.7 * i;
        const double c = cross_power(l, m);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        CHECK(cross_power(l + 2.0 * m.ell_c_um, m) == doctest::Approx(c).epsilon(1e-10));
    }
}

TEST_CASE("group index depends only on the circumference-FSR product") {
    const double base = group_index({.radius_um = 55.0, .fsr_nm = 3.465}, 1550.0);
    CHECK(group_index({.radius_um = 110.0, .fsr_nm = 3.465 / 2.0}, 1550.0) ==
          doctest::Approx(base).epsilon(1e-12));
    CHECK(group_index({.radius_um = 55.0 * 1.7, .fsr_nm = 3.465 / 1.7}, 1550.0) ==
          doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("sensitivity combinations are linear") {
    const SensitivityLedger ledger = builtin_sensitivity_ledger();
    const double a = sensitivity_combination({{"slot_width", 1.3}}, ledger).delta_ellc_um;
    const double b = sensitivity_combination({{"sin_thickness", -0.7}}, ledger).delta_ellc_um;
    const double both =
        sensitivity_combination({{"slot_width", 1.3}, {"sin_thickness", -0.7}}, ledger).delta_ellc_um;
    CHECK(both == doctest::Approx(a + b).epsilon(1e-12));
    CHECK(sensitivity_combination({{"slot_width", 2.6}}, ledger).delta_ellc_um ==
          doctest::Approx(2.0 * a).epsilon(1e-12));
}

TEST_CASE("design length inverts cross power") {
    const CouplerModel m = default_coupler_model();
    const DesignLength half = design_length(0.5, 0, Branch::plus, m);
    CHECK(half.valid);
    CHECK(half.l_int_um == doctest::Approx(8.65).epsilon(1e-9));
    CHECK(cross_power(half.l_int_um, m) == doctest::Approx(0.5).epsilon(1e-12));
    // Higher-order and minus-branch solutions also land on the target.
    for (const int k : {0, 1, 2}) {
        for (const Branch br : {Branch::plus, Branch::minus}) {
            const DesignLength dl = design_length(0.37, k, br, m);
            if (!dl.valid) continue;
            CHECK(cross_power(dl.l_int_um, m) == doctest::Approx(0.37).epsilon(1e-12));
        }
    }
    // k = 0 minus branch is negative for mid ratios with this offset length.
    CHECK(!design_length(0.5, 0, Branch::minus, m).valid);
    CHECK_THROWS_AS(design_length(1.5, 0, Branch::plus, m), std::domain_error);
}

TEST_CASE("cross power sensitivity matches the analytic slope") {
    const CouplerModel m{.ell_c_um = 37.47, .ell_0_um = 8.2};
    const DesignLength half = design_length(0.5, 0, Branch::plus, m);
    REQUIRE(half.valid);
    const double slope = cross_power_sensitivity(half.l_int_um, m);
    CHECK(slope == doctest::Approx(-0.0209607).epsilon(1e-4));
    CHECK(slope == doctest::Approx(-std::numbers::pi / (4.0 * 37.47)).epsilon(1e-12));
    // Finite-difference cross check.
    const double d = 1e-5;
    CouplerModel up = m;
    up.ell_c_um += d;
    CouplerModel dn = m;
    dn.ell_c_um -= d;
    const double fd = (cross_power(half.l_int_um, up) - cross_power(half.l_int_um, dn)) / (2.0 * d);
    CHECK(slope == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("splitting dispersion matches finite differences of the model") {
    CouplerModel m = default_coupler_model();
    m.dell_c_dlambda = -0.086;
    m.dell_0_dlambda = 0.004;
    const double d_lambda = 1e-4;
    for (const auto& [c, k, br] : {std::tuple{0.5, 0, Branch::plus}, std::tuple{0.3, 1, Branch::plus},
                                   std::tuple{0.5, 1, Branch::minus}}) {
        const DesignLength dl = design_length(c, k, br, m);
        REQUIRE(dl.valid);
        CouplerModel up = m;
        up.ell_c_um += m.dell_c_dlambda * d_lambda;
        up.ell_0_um += m.dell_0_dlambda * d_lambda;
        CouplerModel dn = m;
        dn.ell_c_um -= m.dell_c_dlambda * d_lambda;
        dn.ell_0_um -= m.dell_0_dlambda * d_lambda;
        const double fd =
            std::abs(cross_power(dl.l_int_um, up) - cross_power(dl.l_int_um, dn)) / (2.0 * d_lambda);
        CHECK(splitting_dispersion(c, k, br, m) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("dispersion model sanity") {
    const CouplerModel m = default_coupler_model();
    CHECK(m.has_expected_dispersion_signs());
    CouplerModel odd = m;
    odd.dell_c_dlambda = 0.01;
    CHECK(!odd.has_expected_dispersion_signs());
    CouplerModel bad = m;
    bad.ell_c_um = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("dispersion table interpolates the model over wavelength") {
    const CouplerDispersionTable table = default_dispersion_table();
    const CouplerModel at_center = table.at(1554.0);
    CHECK(at_center.ell_c_um == doctest::Approx(33.7).epsilon(1e-9));
    CHECK(at_center.ell_0_um == doctest::Approx(8.2).epsilon(1e-9));
    CHECK(at_center.dell_c_dlambda == doctest::Approx(-0.086).epsilon(1e-6));
    CHECK(at_center.dell_0_dlambda == doctest::Approx(0.004).epsilon(1e-6));
    // Between samples the value is linear, so the midpoint is the mean of
    // the endpoints.
    const auto& samples = table.samples();
    REQUIRE(samples.size() >= 2);
    const auto& a = samples[0];
    const auto& b = samples[1];
    const CouplerModel mid = table.at(0.5 * (a.lambda_nm + b.lambda_nm));
    CHECK(mid.ell_c_um == doctest::Approx(0.5 * (a.ell_c_um + b.ell_c_um)).epsilon(1e-12));
    CHECK(mid.dell_c_dlambda ==
          doctest::Approx((b.ell_c_um - a.ell_c_um) / (b.lambda_nm - a.lambda_nm)).epsilon(1e-12));
    // Out-of-range lookups clamp to the end segments.
    CHECK(table.at(samples.front().lambda_nm - 100.0).ell_c_um > 0.0);
    CHECK_THROWS_AS(CouplerDispersionTable({{1550.0, 33.0, 8.0}}), std::invalid_argument);
    CHECK_THROWS_AS(CouplerDispersionTable({{1550.0, 33.0, 8.0}, {1550.0, 34.0, 8.0}}),
                    std::invalid_argument);
}

TEST_CASE("builtin sensitivity ledger") {
    const SensitivityLedger ledger = builtin_sensitivity_ledger();
    CHECK(ledger.entries.size() == 11);
    CHECK(ledger.nominal_ellc_um == doctest::Approx(37.47));
    CHECK(ledger.find("slot_width").delta_ellc_um == doctest::Approx(3.29));
    CHECK(ledger.find("wavelength").delta_ellc_um == doctest::Approx(-0.59));
    CHECK_THROWS_AS(ledger.find("no_such_parameter"), std::out_of_range);
}

TEST_CASE("sensitivity ledger file round trip") {
    const SensitivityLedger builtin = builtin_sensitivity_ledger();
    const SensitivityLedger loaded = load_sensitivity_ledger(kDataDir / "coupler_sensitivities.csv");
    REQUIRE(loaded.entries.size() == builtin.entries.size());
    CHECK(loaded.nominal_ellc_um == doctest::Approx(builtin.nominal_ellc_um));
    for (std::size_t i = 0; i < builtin.entries.size(); ++i) {
        CHECK(loaded.entries[i].parameter == builtin.entries[i].parameter);
        CHECK(loaded.entries[i].delta_ellc_um == doctest::Approx(builtin.entries[i].delta_ellc_um));
    }
    const auto tmp = std::filesystem::temp_directory_path() / "ledger_roundtrip.csv";
    save_sensitivity_ledger(loaded, tmp);
    const SensitivityLedger back = load_sensitivity_ledger(tmp);
    REQUIRE(back.entries.size() == loaded.entries.size());
    for (std::size_t i = 0; i < loaded.entries.size(); ++i) {
        CHECK(back.entries[i].parameter == loaded.entries[i].parameter);
        CHECK(back.entries[i].nominal == loaded.entries[i].nominal);
        CHECK(back.entries[i].unit == loaded.entries[i].unit);
        CHECK(back.entries[i].variation == loaded.entries[i].variation);
        CHECK(back.entries[i].delta_ellc_um == doctest::Approx(loaded.entries[i].delta_ellc_um));
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("lateral etch combination of width and slot shifts") {
    const SensitivityLedger ledger = builtin_sensitivity_ledger();
    // A deeper lateral etch narrows both waveguides and widens the slot by
    // twice the per-side bite; the widths pull one way (-4.6 total) and the
    // slot the other (+6.6), nearly cancelling.
    const SensitivityCombination combo = sensitivity_combination(
        {{"width_left_waveguide", 2.0}, {"width_right_waveguide", 2.0}, {"slot_width", 2.0}}, ledger);
    CHECK(combo.delta_ellc_um == doctest::Approx(1.98).epsilon(1e-9));
    CHECK(!combo.delta_c.has_value());
    const SensitivityCombination widths = sensitivity_combination(
        {{"width_left_waveguide", 2.0}, {"width_right_waveguide", 2.0}}, ledger);
    CHECK(widths.delta_ellc_um == doctest::Approx(-4.6).epsilon(1e-9));
    const SensitivityCombination slot = sensitivity_combination({{"slot_width", 2.0}}, ledger);
    CHECK(slot.delta_ellc_um == doctest::Approx(6.58).epsilon(1e-9));
}

TEST_CASE("film thinning combination nearly cancels") {
    const SensitivityLedger ledger = builtin_sensitivity_ledger();
    const SensitivityCombination combo = sensitivity_combination(
        {{"sin_thickness", 1.0}, {"remaining_thickness", 1.0}, {"center_thickness", 1.0}}, ledger);
    CHECK(std::abs(combo.delta_ellc_um) <= 0.05);
}

TEST_CASE("sensitivity combination chained to a design point") {
    const SensitivityLedger ledger = builtin_sensitivity_ledger();
    const CouplerModel m{.ell_c_um = 37.47, .ell_0_um = 8.2};
    const DesignLength half = design_length(0.5, 0, Branch::plus, m);
    REQUIRE(half.valid);
    const SensitivityCombination combo =
        sensitivity_combination({{"slot_width", 1.0}}, ledger, half.l_int_um, m);
    REQUIRE(combo.delta_c.has_value());
    CHECK(*combo.delta_c ==
          doctest::Approx(3.29 * cross_power_sensitivity(half.l_int_um, m)).epsilon(1e-9));
    CHECK_THROWS_AS(sensitivity_combination({{"bogus", 1.0}}, ledger), std::out_of_range);
}
