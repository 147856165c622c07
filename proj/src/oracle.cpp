#include "decolab/oracle.hpp"

#include "decolab/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace decolab {

namespace {

using Index = Eigen::Index;

// Configurations p_n |e_n><e_n| of the environment state, dropping the
// lightest ones up to a total weight of 1e-14 (then renormalizing).
void env_configurations(const DenseOperator& rho_env, std::vector<double>& w, std::vector<Vector>& e) {
    const Matrix& m = rho_env.matrix();
    const Index d = m.rows();
    const bool diagonal = (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    std::vector<std::pair<double, Vector>> all;
    if (diagonal) {
        for (Index i = 0; i < d; ++i) {
            Vector v = Vector::Zero(d);
            v(i) = 1.0;
            all.emplace_back(m(i, i).real(), std::move(v));
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        if (es.info() != Eigen::Success) throw NumericalError("oracle: environment eigendecomposition failed");
        for (Index i = 0; i < d; ++i) all.emplace_back(es.eigenvalues()(i), es.eigenvectors().col(i));
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double total = 0.0;
    for (const auto& [p, v] : all) total += std::max(p, 0.0);
    double dropped = 0.0;
    while (!all.empty() && dropped + std::max(all.back().first, 0.0) <= 1e-14 * total) {
        dropped += std::max(all.back().first, 0.0);
        all.pop_back();
    }
    const double kept = total - dropped;
    w.clear();
    e.clear();
    for (auto& [p, v] : all) {
        w.push_back(std::max(p, 0.0) / kept);
        e.push_back(std::move(v));
    }
}

} // namespace

DenseOperator evolve_exact(const ModelHamiltonian& model, const DenseOperator& rho0, double t) {
    if (!(rho0.space() == model.space))
        throw InvalidArgument("evolve_exact: rho0 does not live on the model space");
    const DenseOperator out = apply(herm_propagator(model.total(), t), rho0);
    if (std::abs(out.trace() - rho0.trace()) > 1e-10) throw NumericalError("evolve_exact: trace not preserved");
    return out;
}

Dynamics::Dynamics(ModelHamiltonian m)
    : model(std::move(m)), total(model.total()), free_system(model.h0_system) {}

std::shared_ptr<const Dynamics> make_dynamics(ModelHamiltonian model) {
    return std::make_shared<const Dynamics>(std::move(model));
}

FidelityOracle::FidelityOracle(std::shared_ptr<const Dynamics> dynamics, const DenseOperator& rho_env)
    : dyn_(std::move(dynamics)) {
    if (!(rho_env.space() == dyn_->model.env_space()))
        throw InvalidArgument("FidelityOracle: environment state does not match the model");
    if (!rho_env.is_density(1e-10)) throw InvalidArgument("FidelityOracle: environment state is not a density");
    env_configurations(rho_env, weights_, configs_);
}

FidelityOracle::FidelityOracle(const ModelHamiltonian& model, const DenseOperator& rho_env)
    : FidelityOracle(make_dynamics(model), rho_env) {}

FidelityCurve FidelityOracle::extended(const Vector& psi, std::size_t dr_, std::span<const double> times) const {
    if (times.empty() || times.front() != 0.0) throw InvalidArgument("fidelity curve: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw InvalidArgument("fidelity curve: times must be strictly increasing");

    const auto& model = dyn_->model;
    const auto ds = static_cast<Index>(model.system_space().total());
    const auto de = static_cast<Index>(model.env_space().total());
    const auto dr = static_cast<Index>(dr_);
    const Index d = ds * de;

    // Fixed unitary W on (r, s) whose first row is psi^dagger (up to phase).
    Eigen::HouseholderQR<Matrix> qr(psi);
    const Matrix w = (qr.householderQ() * Matrix::Identity(dr * ds, dr * ds)).adjoint();

    // Initial columns psi_r (x) e_n for nonzero ancilla rows r, all configurations n.
    std::vector<Index> rows;
    for (Index r = 0; r < dr; ++r)
        if (psi.segment(r * ds, ds).squaredNorm() > 0.0) rows.push_back(r);
    const auto nr = static_cast<Index>(rows.size());
    const auto nc = static_cast<Index>(configs_.size());
    Matrix x(d, nr * nc);
    for (Index n = 0; n < nc; ++n)
        for (Index a = 0; a < nr; ++a) {
            const auto sys = psi.segment(rows[static_cast<std::size_t>(a)] * ds, ds);
            auto col = x.col(n * nr + a);
            for (Index s = 0; s < ds; ++s) col.segment(s * de, de) = sys(s) * configs_[static_cast<std::size_t>(n)];
        }
    const Matrix& v = dyn_->total.eigenvectors();
    const Eigen::VectorXd& ev = dyn_->total.eigenvalues();
    const Matrix c = v.adjoint() * x;

    FidelityCurve out;
    out.times.assign(times.begin(), times.end());
    Matrix phased(c.rows(), c.cols()), y(d, c.cols()), z(de, dr * ds);
    for (const double t : times) {
        if (t == 0.0) {
            out.values.push_back(1.0);
            out.infidelity.push_back(0.0);
            continue;
        }
        const Vector ph = (Complex(0.0, -t) * ev.cast<Complex>()).array().exp();
        phased = ph.asDiagonal() * c;
        y.noalias() = v * phased;
        const Matrix u0t = dyn_->free_system.at(t).matrix().adjoint().transpose();
        double fid = 0.0, infid = 0.0, norm = 0.0;
        for (Index n = 0; n < nc; ++n) {
            z.setZero();
            for (Index a = 0; a < nr; ++a) {
                Eigen::Map<const Matrix> ys(y.col(n * nr + a).data(), de, ds);
                z.middleCols(rows[static_cast<std::size_t>(a)] * ds, ds).noalias() = ys * u0t;
            }
            const Matrix q = z * w.transpose();
            const double p = weights_[static_cast<std::size_t>(n)];
            fid += p * q.col(0).squaredNorm();
            infid += p * q.rightCols(q.cols() - 1).squaredNorm();
            norm += p * q.squaredNorm();
        }
        if (std::abs(norm - 1.0) > 1e-10) throw NumericalError("fidelity curve: evolved state lost normalization");
        if (fid > 1.0 + 1e-9 || fid < 0.0) throw NumericalError("fidelity curve: fidelity outside [0, 1]");
        out.values.push_back(fid);
        out.infidelity.push_back(infid);
    }
    return out;
}

FidelityCurve FidelityOracle::io(const Ket& psi0, std::span<const double> times) const {
    if (!(psi0.space() == dyn_->model.system_space()))
        throw InvalidArgument("fidelity_curve_io: state does not live on the qubit space");
    return extended(psi0.amplitudes(), 1, times);
}

FidelityCurve FidelityOracle::entanglement(const DenseOperator& rho_s, std::span<const double> times,
                                           const Matrix* ancilla_unitary) const {
    if (!(rho_s.space() == dyn_->model.system_space()))
        throw InvalidArgument("fidelity_curve_ent: state does not live on the qubit space");
    const Ket pur = purify(rho_s);
    const auto n = static_cast<Index>(rho_s.dim());
    Vector psi = pur.amplitudes();
    if (ancilla_unitary) {
        if (ancilla_unitary->rows() != n || ancilla_unitary->cols() != n)
            throw InvalidArgument("fidelity_curve_ent: ancilla unitary has the wrong dimension");
        Eigen::Map<Matrix> m(psi.data(), n, n); // (s, r)
        m = (m * ancilla_unitary->transpose()).eval();
    }
    return extended(psi, static_cast<std::size_t>(n), times);
}

FidelityCurve FidelityOracle::average(const Ensemble& ensemble, std::span<const double> times) const {
    FidelityCurve out;
    for (const auto& m : ensemble.members()) {
        const FidelityCurve c = io(m.psi, times);
        if (out.times.empty()) {
            out = c;
            for (auto& v : out.values) v *= m.p;
            for (auto& v : out.infidelity) v *= m.p;
            continue;
        }
        for (std::size_t i = 0; i < c.times.size(); ++i) {
            out.values[i] += m.p * c.values[i];
            out.infidelity[i] += m.p * c.infidelity[i];
        }
    }
    return out;
}

FidelityCurve fidelity_curve_io(const ModelHamiltonian& model, const Ket& psi0, const DenseOperator& rho_env,
                                std::span<const double> times) {
    return FidelityOracle(model, rho_env).io(psi0, times);
}

FidelityCurve fidelity_curve_ent(const ModelHamiltonian& model, const DenseOperator& rho_s,
                                 const DenseOperator& rho_env, std::span<const double> times) {
    return FidelityOracle(model, rho_env).entanglement(rho_s, times);
}

FidelityCurve fidelity_curve_avg(const ModelHamiltonian& model, const Ensemble& ensemble,
                                 const DenseOperator& rho_env, std::span<const double> times) {
    return FidelityOracle(model, rho_env).average(ensemble, times);
}

std::vector<double> uniform_times(double t_max, std::size_t count) {
    if (count < 2 || !(t_max > 0.0)) throw InvalidArgument("uniform_times: need t_max > 0 and at least 2 points");
    std::vector<double> t(count);
    for (std::size_t j = 0; j < count; ++j)
        t[j] = t_max * static_cast<double>(j) / static_cast<double>(count - 1);
    return t;
}

ExpansionEstimate estimate_c2(const FidelityCurve& curve) {
    const auto n = static_cast<Index>(curve.times.size());
    if (n < 5) throw InvalidArgument("estimate_c2: need at least 5 samples");
    if (curve.times.front() != 0.0) throw InvalidArgument("estimate_c2: times must start at 0");
    const double t_max = curve.times.back();
    const bool has_infid = curve.infidelity.size() == curve.times.size();
    Eigen::MatrixXd a(n, 4);
    Eigen::VectorXd b(n);
    for (Index j = 0; j < n; ++j) {
        const double tau = curve.times[static_cast<std::size_t>(j)] / t_max;
        a(j, 0) = tau;
        a(j, 1) = tau * tau;
        a(j, 2) = tau * tau * tau;
        a(j, 3) = tau * tau * tau * tau;
        b(j) = has_infid ? curve.infidelity[static_cast<std::size_t>(j)]
                         : 1.0 - curve.values[static_cast<std::size_t>(j)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    ExpansionEstimate e;
    e.condition = sv(0) / sv(sv.size() - 1);
    if (!std::isfinite(e.condition) || e.condition > 1e12)
        throw NumericalError("estimate_c2: ill-conditioned fit, condition " + std::to_string(e.condition));
    const Eigen::VectorXd coef = svd.solve(b);
    e.c1_hat = coef(0) / t_max;
    e.c2_hat = 2.0 * coef(1) / (t_max * t_max);
    e.residual = (a * coef - b).cwiseAbs().maxCoeff();
    e.t_max = t_max;
    e.samples = static_cast<std::size_t>(n);
    e.max_infidelity = b.maxCoeff();
    return e;
}

ExpansionEstimate fit_short_time(const CurveFn& curve, double c2_rough, double frequency_scale,
                                 const WindowPolicy& policy) {
    const double lambda = std::max(frequency_scale, 1e-300);
    double t_max = policy.kappa / std::max(lambda, c2_rough > 0.0 ? std::sqrt(c2_rough) : 0.0);
    if (!(c2_rough > 0.0)) {
        // Probe: one point at the frequency-limited window.
        const std::vector<double> probe{0.0, t_max};
        const FidelityCurve c = curve(probe);
        c2_rough = 2.0 * c.infidelity.back() / (t_max * t_max);
    }
    if (c2_rough > 0.0) t_max = std::min(t_max, std::sqrt(2.0 * policy.target_infidelity / c2_rough));
    ExpansionEstimate best;
    for (int i = 0; i <= policy.max_shrink; ++i, t_max *= 0.5) {
        const auto times = uniform_times(t_max);
        best = estimate_c2(curve(times));
        if (best.residual <= policy.residual_tol) {
            best.converged = true;
            return best;
        }
    }
    return best;
}

std::string to_string(VerifyPath p) {
    switch (p) {
    case VerifyPath::io: return "io";
    case VerifyPath::entanglement: return "entanglement";
    case VerifyPath::average: return "average";
    case VerifyPath::factorized: return "factorized";
    }
    return "io";
}

double coupling_rate_scale(const QubitLattice& lattice, const BathModeSet& modes) {
    double s = 0.0;
    for (const auto& m : modes.modes) s += m.g * m.g * coth_factor(m.omega, modes.temperature);
    const double a = static_cast<double>(lattice.size()) * lattice.coupling_norm();
    return 2.0 * a * a * s;
}

std::string dynamics_key(const Scenario& s) {
    std::string k = std::to_string(s.n_max) + "|" + std::to_string(s.lattice.lambda1) + "," +
                    std::to_string(s.lattice.lambda2) + "|";
    for (std::size_t l = 0; l < s.lattice.size(); ++l)
        k += std::to_string(s.lattice.positions[l]) + ":" + std::to_string(s.lattice.splitting(l)) + ",";
    k += "|";
    for (const auto& m : s.modes.modes)
        k += std::to_string(m.k) + ":" + std::to_string(m.omega) + ":" + std::to_string(m.g) + ",";
    return k;
}

VerificationReport verify_expansion(const Scenario& sc, std::shared_ptr<const Dynamics> dynamics,
                                    const WindowPolicy& policy) {
    VerificationReport rep;
    rep.scenario = sc.name;
    rep.path = sc.path;
    if (!dynamics) dynamics = make_dynamics(build_hamiltonian(sc.lattice, sc.modes, sc.n_max));
    const ModelHamiltonian& model = dynamics->model;
    const DenseOperator rho_env = thermal_env_state(sc.modes, sc.n_max);
    const FidelityOracle oracle(dynamics, rho_env);
    rep.abs_floor = 1e-6 * coupling_rate_scale(sc.lattice, sc.modes) + kZeroRate;

    CurveFn curve;
    switch (sc.path) {
    case VerifyPath::io:
        if (!sc.psi) throw InvalidArgument("verify_expansion: io scenario needs a pure state");
        rep.c2_analytic = input_output_c2(*sc.psi, model.h_i, rho_env).c2;
        curve = [&](std::span<const double> t) { return oracle.io(*sc.psi, t); };
        break;
    case VerifyPath::entanglement:
        rep.c2_analytic = entanglement_c2(sc.rho_s, model.h_i, rho_env).c2;
        curve = [&](std::span<const double> t) { return oracle.entanglement(sc.rho_s, t); };
        break;
    case VerifyPath::average:
        if (!sc.ensemble) throw InvalidArgument("verify_expansion: average scenario needs an ensemble");
        rep.c2_analytic = average_c2(*sc.ensemble, model.h_i, rho_env).c2;
        curve = [&](std::span<const double> t) { return oracle.average(*sc.ensemble, t); };
        break;
    case VerifyPath::factorized:
        if (!sc.modes.is_symmetric())
            throw InvalidArgument("verify_expansion: factorized path needs +-k symmetric modes");
        rep.c2_analytic = decoherence_rate(sc.lattice, sc.modes, sc.rho_s);
        curve = [&](std::span<const double> t) { return oracle.entanglement(sc.rho_s, t); };
        // The untruncated rate is only meaningful if the truncation has converged.
        for (const auto& m : sc.modes.modes) {
            const double a = truncated_coth(m.omega, sc.modes.temperature, sc.n_max);
            const double b = truncated_coth(m.omega, sc.modes.temperature, 2 * sc.n_max);
            if (std::abs(a - b) > 1e-8 * std::abs(b)) {
                rep.truncation_ok = false;
                rep.message = "truncation not converged: doubling n_max shifts coth by " +
                              std::to_string(std::abs(a - b) / std::abs(b));
            }
        }
        break;
    }
    if (!rep.truncation_ok) return rep;

    try {
        rep.fit = fit_short_time(curve, rep.c2_analytic, model.frequency_scale, policy);
    } catch (const NumericalError& e) {
        rep.message = e.what();
        return rep;
    }
    rep.c2_fitted = rep.fit.c2_hat;
    const double diff = std::abs(rep.c2_fitted - rep.c2_analytic);
    rep.rel_err = rep.c2_analytic != 0.0 ? diff / std::abs(rep.c2_analytic) : diff;
    rep.pass = diff <= kVerifyRelTol * std::abs(rep.c2_analytic) + rep.abs_floor;
    if (!rep.fit.converged) {
        rep.pass = false;
        rep.message = "fit residual " + std::to_string(rep.fit.residual) + " above tolerance";
    }
    return rep;
}

} // namespace decolab
