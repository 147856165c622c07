// fidelity_expansion.hpp: closed-form short-time coefficients of the
// input-output, entanglement and average fidelities.
//
// Convention. For every fidelity kind
//
//     F(t) = 1 - c1 t - (c2 / 2) t^2 + O(t^3),      c2 = 1 / tau2^2 = -F''(0),
//
// and the closed forms are c1 = 0 and c2 = 2 * variance_form(...). The factor
// 1/2 on the quadratic term is what exact evolution produces for the damping
// rate defined through the variance form; see README for the derivation.

#pragma once

#include "decolab/operator_core.hpp"

#include <limits>
#include <vector>

namespace decolab {

// Rates below this are reported as an infinite characteristic time.
inline constexpr double kZeroRate = 1e-14;

struct ExpansionCoefficients {
    double c1 = 0.0; // 1/time
    double c2 = 0.0; // 1/time^2

    // tau2 = c2^{-1/2}; +inf when the rate vanishes.
    double tau2() const {
        return c2 < kZeroRate ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(c2);
    }
    ExpansionCoefficients scaled(double factor) const { return {c1 * factor, c2 * factor}; }
};

struct EnsembleMember {
    double p;
    Ket psi;
};

// Finite mixture sum_i p_i |psi_i><psi_i|: weights non-negative, summing to 1
// within 1e-12, all kets on one space.
class Ensemble {
public:
    explicit Ensemble(std::vector<EnsembleMember> members);

    const std::vector<EnsembleMember>& members() const noexcept { return members_; }
    const HilbertSpace& space() const { return members_.front().psi.space(); }
    std::size_t size() const noexcept { return members_.size(); }

    DenseOperator mixture() const;

private:
    std::vector<EnsembleMember> members_;
};

ExpansionCoefficients input_output_c2(const Ket& psi0, const DenseOperator& h_i, const DenseOperator& rho_env);
ExpansionCoefficients entanglement_c2(const DenseOperator& rho_s, const DenseOperator& h_i,
                                      const DenseOperator& rho_env);
// Evaluates <H^2> - tr_env[rho_env sum_i p_i <H>_i^2] directly; the linear
// combination of member input_output_c2 values is an independent route.
ExpansionCoefficients average_c2(const Ensemble& ensemble, const DenseOperator& h_i,
                                 const DenseOperator& rho_env);

struct RateInequalityReport {
    double c2_e = 0.0;
    double c2_a = 0.0;
    bool holds = false;
};

// Entanglement-fidelity damping dominates any average-fidelity damping over
// decompositions of the same rho_s. Throws if `ensemble` does not mix to
// `rho_s` within 1e-10.
RateInequalityReport check_rate_inequality(const DenseOperator& rho_s, const Ensemble& ensemble,
                                           const DenseOperator& h_i, const DenseOperator& rho_env);

} // namespace decolab
