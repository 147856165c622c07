#include "decolab/fidelity_expansion.hpp"

#include "decolab/error.hpp"

#include <cmath>
#include <string>

namespace decolab {

Ensemble::Ensemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
    if (members_.empty()) throw InvalidArgument("Ensemble: no members");
    double total = 0.0;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        const auto& m = members_[i];
        if (!(m.p >= 0.0) || !std::isfinite(m.p))
            throw InvalidArgument("Ensemble: weight " + std::to_string(i) + " is negative or non-finite");
        if (!(m.psi.space() == members_.front().psi.space()))
            throw InvalidArgument("Ensemble: member " + std::to_string(i) + " lives on a different space");
        total += m.p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw InvalidArgument("Ensemble: weights sum to " + std::to_string(total) + ", not 1");
}

DenseOperator Ensemble::mixture() const {
    auto rho = DenseOperator::zero(space());
    for (const auto& m : members_) rho += m.p * m.psi.projector();
    return rho;
}

ExpansionCoefficients input_output_c2(const Ket& psi0, const DenseOperator& h_i, const DenseOperator& rho_env) {
    return {0.0, 2.0 * variance_form(h_i, psi0.projector(), rho_env)};
}

ExpansionCoefficients entanglement_c2(const DenseOperator& rho_s, const DenseOperator& h_i,
                                      const DenseOperator& rho_env) {
    if (!rho_s.is_density(1e-10)) throw InvalidArgument("entanglement_c2: rho_s is not a density");
    return {0.0, 2.0 * variance_form(h_i, rho_s, rho_env)};
}

ExpansionCoefficients average_c2(const Ensemble& ensemble, const DenseOperator& h_i,
                                 const DenseOperator& rho_env) {
    const double h2 = coupling_second_moment(h_i, ensemble.mixture(), rho_env);
    double sub = 0.0;
    for (const auto& m : ensemble.members())
        sub += m.p * env_square_expectation(system_average(h_i, m.psi.projector()), rho_env);
    const double v = h2 - sub;
    if (v < -1e-9 * std::max(1.0, std::abs(h2)))
        throw NumericalError("average_c2: negative variance " + std::to_string(v));
    return {0.0, 2.0 * std::max(0.0, v)};
}

RateInequalityReport check_rate_inequality(const DenseOperator& rho_s, const Ensemble& ensemble,
                                           const DenseOperator& h_i, const DenseOperator& rho_env) {
    const double dev = (ensemble.mixture().matrix() - rho_s.matrix()).cwiseAbs().maxCoeff();
    if (dev > 1e-10)
        throw InvalidArgument("check_rate_inequality: ensemble does not reproduce rho_s (max deviation " +
                              std::to_string(dev) + ")");
    RateInequalityReport r;
    r.c2_e = entanglement_c2(rho_s, h_i, rho_env).c2;
    r.c2_a = average_c2(ensemble, h_i, rho_env).c2;
    r.holds = r.c2_e >= r.c2_a - 1e-10;
    return r;
}

} // namespace decolab
