#include "decolab/spectral.hpp"

#include "decolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace decolab {

namespace {

// w coth(w / 2T): tends to 2T as w -> 0 and to w at T = 0.
double thermal_weight(double w, double temperature) {
    if (temperature == 0.0) return w;
    const double x = w / (2.0 * temperature);
    if (x < 1e-3) return 2.0 * temperature * (1.0 + x * x / 3.0 - x * x * x * x / 45.0);
    return w / std::tanh(x);
}

// Upper bound on Omega^2(0) / amplitude, used to scale tolerances.
double ohmic_scale(const OhmicBath& b) { return 2.0 * (b.omega_c * b.omega_c + 2.0 * b.temperature * b.omega_c); }

// Panels sized to the oscillation period and the thermal scale, out to where
// e^{-w/omega_c} is below ~1e-20.
std::vector<double> ohmic_breakpoints(const OhmicBath& b, double u) {
    const double top = b.omega_c * 47.0;
    const double width = std::numbers::pi * b.omega_c / std::max(std::abs(u), 1.0);
    std::vector<double> pts{0.0};
    if (b.temperature > 0.0)
        for (double s = std::min(b.temperature, b.omega_c) * 1e-3; s < std::min(width, top); s *= 4.0) pts.push_back(s);
    for (double w = width; w < top; w += width) pts.push_back(w);
    pts.push_back(top);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

QuadratureResult ohmic_moment(const OhmicBath& b, int power, double delta_r) {
    const double u = b.u(delta_r);
    const auto f = [&](double w) {
        return std::pow(w, power) * thermal_weight(w, b.temperature) * std::exp(-w / b.omega_c) *
               std::cos(w * delta_r / b.v);
    };
    const auto pts = ohmic_breakpoints(b, u);
    const double scale = ohmic_scale(b) * std::pow(b.omega_c, power);
    return integrate_adaptive(f, pts, 1e-14 * scale, 0.0);
}

} // namespace

void OhmicBath::validate() const {
    if (!(omega_c > 0.0)) throw InvalidArgument("bath.ohmic.omega_c: must be positive");
    if (!(v > 0.0)) throw InvalidArgument("bath.ohmic.v: must be positive");
    if (!(temperature >= 0.0)) throw InvalidArgument("bath.ohmic.temperature: must be non-negative");
    if (!(amplitude > 0.0)) throw InvalidArgument("bath.ohmic.amplitude: must be positive");
}

std::string to_string(Regime r) {
    switch (r) {
    case Regime::independent: return "independent";
    case Regime::collective: return "collective";
    case Regime::intermediate: return "intermediate";
    }
    return "intermediate";
}

GaussianSpectrum spectrum_moments(const BathModeSet& modes) {
    if (modes.modes.empty()) throw InvalidArgument("spectrum_moments: empty mode set");
    double x = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto& m : modes.modes) {
        const double w = 2.0 * m.g * m.g * coth_factor(m.omega, modes.temperature);
        const double k = std::abs(m.k);
        x += w;
        m1 += w * k;
        m2 += w * k * k;
    }
    if (!(x > 0.0)) throw InvalidArgument("spectrum_moments: all couplings vanish");
    const double mean = m1 / x;
    return {mean, std::sqrt(std::max(0.0, m2 / x - mean * mean)), x};
}

double gaussian_correlation(const GaussianSpectrum& s, double delta_r) {
    return s.x * std::cos(s.k_bar * delta_r) * std::exp(-0.5 * s.delta_k * s.delta_k * delta_r * delta_r);
}

CorrelationFn gaussian_correlation_fn(const GaussianSpectrum& spec) {
    return [spec](double d) { return gaussian_correlation(spec, d); };
}

RegimeReport classify_regime(double d, const GaussianSpectrum& spec, const RegimeThresholds& th) {
    if (!(d > 0.0)) throw InvalidArgument("classify_regime: spacing d must be positive");
    RegimeReport r;
    r.dk_d = spec.delta_k * d;
    r.kbar_d = std::abs(spec.k_bar) * d;
    r.degenerate = !(spec.delta_k > 0.0);
    if (r.dk_d >= th.independent)
        r.regime = Regime::independent;
    else if (r.kbar_d <= th.collective && r.dk_d <= th.collective)
        r.regime = Regime::collective;
    else
        r.regime = Regime::intermediate;
    return r;
}

double ohmic_correlation_highT(const OhmicBath& b, double delta_r) {
    const double u = b.u(delta_r);
    return b.amplitude * (4.0 * b.temperature / b.omega_c) * b.omega_c * b.omega_c / (1.0 + u * u);
}

double ohmic_correlation_lowT(const OhmicBath& b, double delta_r) {
    const double u2 = b.u(delta_r) * b.u(delta_r);
    return b.amplitude * 2.0 * b.omega_c * b.omega_c * (1.0 - u2) / ((1.0 + u2) * (1.0 + u2));
}

QuadratureResult ohmic_correlation_quad_result(const OhmicBath& b, double delta_r) {
    b.validate();
    auto r = ohmic_moment(b, 0, delta_r);
    r.value *= 2.0 * b.amplitude;
    r.error *= 2.0 * b.amplitude;
    r.converged = r.error <= 1e-9 * b.amplitude * ohmic_scale(b);
    return r;
}

double ohmic_correlation_quad(const OhmicBath& b, double delta_r) {
    const auto r = ohmic_correlation_quad_result(b, delta_r);
    if (!r.converged)
        throw NumericalError("ohmic_correlation_quad: no convergence at delta_r = " + std::to_string(delta_r) +
                             ", error estimate " + std::to_string(r.error));
    return r.value;
}

GaussianSpectrum ohmic_spectrum_moments(const OhmicBath& b) {
    b.validate();
    const auto m0 = ohmic_moment(b, 0, 0.0), m1 = ohmic_moment(b, 1, 0.0), m2 = ohmic_moment(b, 2, 0.0);
    if (!(m0.converged && m1.converged && m2.converged))
        throw NumericalError("ohmic_spectrum_moments: quadrature did not converge");
    const double mean_w = m1.value / m0.value;
    const double var_w = std::max(0.0, m2.value / m0.value - mean_w * mean_w);
    return {mean_w / b.v, std::sqrt(var_w) / b.v, 2.0 * b.amplitude * m0.value};
}

} // namespace decolab
