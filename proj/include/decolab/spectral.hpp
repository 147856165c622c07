// spectral.hpp: continuum descriptions of the spatial correlation function.
//
// Gaussian carrier spectrum:  Omega^2(d) ~ x cos(kbar d) exp(-(dk d)^2 / 2)
// Ohmic bath (linear dispersion omega = v k), u = omega_c d / v:
//   high T:  Omega^2 ~ (4T / omega_c) omega_c^2 / (1 + u^2)
//   low T:   Omega^2 ~ 2 omega_c^2 (1 - u^2) / (1 + u^2)^2
//   any T:   Omega^2 = 2 A int_0^inf dw w e^{-w/omega_c} coth(w / 2T) cos(w d / v)

#pragma once

#include "decolab/qubit_bath.hpp"
#include "decolab/quadrature.hpp"

#include <string>

namespace decolab {

struct GaussianSpectrum {
    double k_bar = 0.0;
    double delta_k = 0.0;
    double x = 1.0; // Omega^2(0)
};

struct OhmicBath {
    double omega_c = 1.0;
    double v = 1.0;
    double temperature = 0.0;
    double amplitude = 1.0;

    void validate() const;
    double u(double delta_r) const { return omega_c * delta_r / v; }
};

enum class Regime { independent, collective, intermediate };
std::string to_string(Regime r);

// "much greater than" / "much less than" cut-offs on (dk) d and kbar d.
struct RegimeThresholds {
    double independent = 10.0;
    double collective = 0.1;
};

struct RegimeReport {
    Regime regime = Regime::intermediate;
    double dk_d = 0.0;
    double kbar_d = 0.0;
    bool degenerate = false; // delta_k == 0: point spectrum
};

// x per the normalization constant, kbar and dk as mean and standard deviation
// of |k| weighted by 2 g_k^2 coth(omega_k / 2T).
GaussianSpectrum spectrum_moments(const BathModeSet& modes);

double gaussian_correlation(const GaussianSpectrum& spec, double delta_r);
CorrelationFn gaussian_correlation_fn(const GaussianSpectrum& spec);

RegimeReport classify_regime(double d, const GaussianSpectrum& spec, const RegimeThresholds& th = {});

double ohmic_correlation_highT(const OhmicBath& bath, double delta_r);
double ohmic_correlation_lowT(const OhmicBath& bath, double delta_r);

// Adaptive quadrature of the thermal Ohmic integral. Throws NumericalError
// (with the achieved error estimate) if the estimate exceeds 1e-9 Omega^2(0).
QuadratureResult ohmic_correlation_quad_result(const OhmicBath& bath, double delta_r);
double ohmic_correlation_quad(const OhmicBath& bath, double delta_r);

// Moments of the Ohmic f(k) over k >= 0, with x = Omega^2(0) from quadrature.
GaussianSpectrum ohmic_spectrum_moments(const OhmicBath& bath);

} // namespace decolab
