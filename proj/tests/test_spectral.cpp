#include <doctest.h>

#include "decolab/error.hpp"
#include "decolab/quadrature.hpp"
#include "decolab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace decolab;

namespace {

// 32 +-k pairs whose weights 2 g^2 follow a Gaussian of mean kbar, width dk.
BathModeSet gaussian_comb(double kbar, double dk) {
    BathModeSet m;
    const int n = 32;
    for (int j = 0; j < n; ++j) {
        const double k = kbar - 4 * dk + 8 * dk * (j + 0.5) / n;
        const double w = std::exp(-0.5 * (k - kbar) * (k - kbar) / (dk * dk));
        const double g = 0.01 * std::sqrt(w);
        m.modes.push_back({k, 1.0, g});
        m.modes.push_back({-k, 1.0, g});
    }
    return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> u_grid() {
    std::vector<double> u;
    for (int i = 0; i <= 100; ++i) u.push_back(0.1 * i);
    return u;
}

} // namespace

TEST_CASE("spectrum moments of simple mode sets") {
    BathModeSet one;
    one.modes = {{1.3, 1.0, 0.05}, {-1.3, 1.0, 0.05}};
    auto s = spectrum_moments(one);
    CHECK(s.k_bar == doctest::Approx(1.3));
    CHECK(s.delta_k < 1e-7);
    CHECK(s.x == doctest::Approx(4 * 0.05 * 0.05));

    BathModeSet two;
    const double k0 = 2.0, d = 0.3;
    two.modes = {{k0 - d, 1.0, 0.05}, {-(k0 - d), 1.0, 0.05}, {k0 + d, 1.0, 0.05}, {-(k0 + d), 1.0, 0.05}};
    s = spectrum_moments(two);
    CHECK(s.k_bar == doctest::Approx(k0));
    CHECK(s.delta_k == doctest::Approx(d));
}

TEST_CASE("moments of a gaussian comb and the gaussian correlation") {
    const double kbar = 5.0, dk = 0.5;
    auto comb = gaussian_comb(kbar, dk);
    auto s = spectrum_moments(comb);
    CHECK(rel(s.k_bar, kbar) < 0.02);
    CHECK(rel(s.delta_k, dk) < 0.02);
    CHECK(s.x == doctest::Approx(correlation_fn_discrete(comb, 0.0)));
    for (double delta = 0.0; delta * dk <= 2.0; delta += 0.05)
        CHECK(std::abs(gaussian_correlation(s, delta) - correlation_fn_discrete(comb, delta)) <= 0.05 * s.x);
}

TEST_CASE("gaussian correlation values") {
    GaussianSpectrum s{2.0, 0.3, 0.7};
    CHECK(gaussian_correlation(s, 0.0) == 0.7);
    CHECK(std::abs(gaussian_correlation(s, std::numbers::pi / 4)) < 1e-15);
    for (double d = -5; d <= 5; d += 0.25) {
        CHECK(std::abs(gaussian_correlation(s, d)) <= s.x);
        CHECK(gaussian_correlation(s, d) == gaussian_correlation(s, -d));
    }
}

TEST_CASE("regime classification") {
    CHECK(classify_regime(10.0, {0.0, 5.0, 1.0}).regime == Regime::independent);
    CHECK(classify_regime(0.01, {1.0, 1.0, 1.0}).regime == Regime::collective);
    CHECK(classify_regime(1.0, {1.0, 1.0, 1.0}).regime == Regime::intermediate);
    // Large kbar d alone is not independence.
    CHECK(classify_regime(1.0, {50.0, 0.01, 1.0}).regime == Regime::intermediate);
    auto r = classify_regime(2.0, {1.0, 0.0, 1.0});
    CHECK(r.degenerate);
    CHECK(r.dk_d == 0.0);
    CHECK_THROWS_AS(classify_regime(0.0, {1.0, 1.0, 1.0}), InvalidArgument);
    CHECK(to_string(Regime::collective) == "collective");
}

TEST_CASE("ohmic regime does not depend on temperature for fixed d") {
    for (double d : {0.01, 1.0, 100.0}) {
        OhmicBath b{1.0, 1.0, 0.0, 1.0};
        auto ref = classify_regime(d, ohmic_spectrum_moments(b)).regime;
        for (double T : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            b.temperature = T;
            CHECK(classify_regime(d, ohmic_spectrum_moments(b)).regime == ref);
        }
    }
}

TEST_CASE("ohmic moments in the two temperature limits") {
    // T = 0: weight w e^{-w/wc}, mean 2 wc, variance 2 wc^2.
    auto cold = ohmic_spectrum_moments({2.0, 4.0, 0.0, 1.0});
    CHECK(cold.k_bar == doctest::Approx(2 * 2.0 / 4.0).epsilon(1e-8));
    CHECK(cold.delta_k == doctest::Approx(std::sqrt(2.0) * 2.0 / 4.0).epsilon(1e-8));
    CHECK(cold.x == doctest::Approx(2 * 4.0).epsilon(1e-8));
    // T >> wc: weight ~ e^{-w/wc}, mean wc, variance wc^2.
    auto hot = ohmic_spectrum_moments({2.0, 4.0, 1e4, 1.0});
    CHECK(hot.k_bar == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(hot.delta_k == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("ohmic high-temperature form") {
    OhmicBath b{1.0, 1.0, 3.0, 1.0};
    const double o0 = ohmic_correlation_highT(b, 0.0);
    CHECK(o0 == doctest::Approx(4 * 3.0));
    CHECK(ohmic_correlation_highT(b, 1.0) / o0 == doctest::Approx(0.5));
    CHECK(ohmic_correlation_highT(b, 3.0) / o0 == doctest::Approx(0.1));
    b.v = 2.0;
    CHECK(ohmic_correlation_highT(b, 2.0) / o0 == doctest::Approx(0.5));
}

TEST_CASE("ohmic low-temperature form") {
    const double wc = 1.5;
    OhmicBath b{wc, 1.0, 0.0, 1.0};
    CHECK(ohmic_correlation_lowT(b, 0.0) == doctest::Approx(2 * wc * wc));
    CHECK(std::abs(ohmic_correlation_lowT(b, 1.0 / wc)) < 1e-15);
    CHECK(ohmic_correlation_lowT(b, 2.0 / wc) == doctest::Approx(2 * wc * wc * (-3.0 / 25.0)));
}

TEST_CASE("ohmic quadrature at zero temperature matches the closed form") {
    OhmicBath b{1.0, 1.0, 0.0, 1.0};
    CHECK(ohmic_correlation_quad(b, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
    for (double u : u_grid()) {
        const double q = ohmic_correlation_quad(b, u), c = ohmic_correlation_lowT(b, u);
        if (std::abs(u - 1.0) > 1e-9)
            CHECK(rel(q, c) < 1e-6);
        else
            CHECK(std::abs(q) < 1e-9);
    }
}

TEST_CASE("ohmic correlation changes sign at u = 1 at zero temperature") {
    OhmicBath b{1.0, 1.0, 0.0, 1.0};
    double lo = 0.5, hi = 1.5;
    CHECK(ohmic_correlation_quad(b, lo) > 0.0);
    CHECK(ohmic_correlation_quad(b, hi) < 0.0);
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (ohmic_correlation_quad(b, mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(0.5 * (lo + hi) - 1.0) < 1e-6);
}

TEST_CASE("ohmic quadrature approaches the high-temperature form") {
    auto max_err = [](double T) {
        OhmicBath b{1.0, 1.0, T, 1.0};
        double e = 0.0;
        for (double u : u_grid()) {
            const double q = ohmic_correlation_quad(b, u), h = ohmic_correlation_highT(b, u);
            e = std::max(e, std::abs(q - h) / std::abs(h));
        }
        return e;
    };
    const double e2 = max_err(1e2), e3 = max_err(1e3), e4 = max_err(1e4);
    CHECK(e2 < 1e-2);
    CHECK(e3 < 1e-3);
    CHECK(e4 < 1e-4);
    // Shrinks at least as fast as omega_c / T.
    CHECK(e3 < 0.1 * e2);
    CHECK(e4 < 0.1 * e3);
}

TEST_CASE("ohmic quadrature reports its error") {
    auto r = ohmic_correlation_quad_result({1.0, 1.0, 0.5, 2.0}, 0.7);
    CHECK(r.converged);
    CHECK(r.error <= 1e-9 * r.value);
    CHECK_THROWS_AS(ohmic_correlation_quad({-1.0, 1.0, 0.5, 1.0}, 0.0), InvalidArgument);
}

TEST_CASE("adaptive quadrature") {
    std::vector<double> pts{0.0, std::numbers::pi};
    auto r = integrate_adaptive([](double x) { return std::sin(x); }, pts, 1e-13);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
    // A kink between breakpoints still converges by bisection.
    std::vector<double> pts2{-1.0, 2.0};
    auto k = integrate_adaptive([](double x) { return std::abs(x); }, pts2, 1e-12);
    CHECK(k.converged);
    CHECK(k.value == doctest::Approx(2.5).epsilon(1e-11));
    // An integrable singularity with too few panels allowed does not.
    auto s = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, std::vector<double>{0.0, 1.0}, 1e-15,
                                0.0, 5);
    CHECK_FALSE(s.converged);
}
