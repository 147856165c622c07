#include "decolab/qubit_bath.hpp"

#include "decolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace decolab {

namespace {

HilbertSpace qubit_space(std::size_t n) { return HilbertSpace(std::vector<std::size_t>(n, 2)); }

std::vector<DenseOperator> coupling_ops(const QubitLattice& lattice) {
    std::vector<DenseOperator> out;
    out.reserve(lattice.size());
    for (std::size_t l = 0; l < lattice.size(); ++l) out.push_back(qubit_coupling_op(lattice, l));
    return out;
}

void require_qubit_density(const QubitLattice& lattice, const DenseOperator& rho_s, const char* what) {
    if (!(rho_s.space() == qubit_space(lattice.size())))
        throw InvalidArgument(std::string(what) + ": state must live on the " + std::to_string(lattice.size()) +
                              "-qubit space");
    if (!rho_s.is_density(1e-10)) throw InvalidArgument(std::string(what) + ": rho_s is not a density");
}

// Qubit pair state |a>|b> for a, b in {-1, +1} of the coupling operator.
Vector pair_vector(const Ket& minus, const Ket& plus, bool logical_one) {
    const Ket& first = logical_one ? plus : minus;
    const Ket& second = logical_one ? minus : plus;
    return kron(first, second).amplitudes();
}

} // namespace

double QubitLattice::coupling_norm() const { return std::hypot(lambda1, lambda2); }

void QubitLattice::validate() const {
    if (positions.empty()) throw InvalidArgument("qubits: at least one qubit is required");
    for (std::size_t l = 0; l < positions.size(); ++l) {
        if (!std::isfinite(positions[l]))
            throw InvalidArgument("qubits[" + std::to_string(l) + "].position: not finite");
        if (l > 0 && !(positions[l] > positions[l - 1]))
            throw InvalidArgument("qubits[" + std::to_string(l) + "].position: positions must be strictly increasing");
    }
    if (!h0_splittings.empty() && h0_splittings.size() != positions.size())
        throw InvalidArgument("h0_splittings: expected " + std::to_string(positions.size()) + " entries, got " +
                              std::to_string(h0_splittings.size()));
    if (!std::isfinite(lambda1) || !std::isfinite(lambda2)) throw InvalidArgument("lambda1/lambda2: not finite");
}

bool BathModeSet::is_symmetric(double tol) const {
    for (const auto& m : modes) {
        if (m.k == 0.0) continue;
        const bool partner = std::any_of(modes.begin(), modes.end(), [&](const BathMode& o) {
            return std::abs(o.k + m.k) <= tol && std::abs(o.omega - m.omega) <= tol && std::abs(o.g - m.g) <= tol;
        });
        if (!partner) return false;
    }
    // Multiplicities of +k and -k must agree as well.
    for (const auto& m : modes) {
        if (m.k <= 0.0) continue;
        const auto count = [&](double k) {
            return std::count_if(modes.begin(), modes.end(), [&](const BathMode& o) {
                return std::abs(o.k - k) <= tol && std::abs(o.omega - m.omega) <= tol && std::abs(o.g - m.g) <= tol;
            });
        };
        if (count(m.k) != count(-m.k)) return false;
    }
    return true;
}

void BathModeSet::validate() const {
    if (modes.empty()) throw InvalidArgument("bath.discrete.modes: at least one mode is required");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& m = modes[i];
        if (!(m.omega > 0.0) || !std::isfinite(m.omega))
            throw InvalidArgument("bath.discrete.modes[" + std::to_string(i) + "].omega: must be positive");
        if (!std::isfinite(m.k) || !std::isfinite(m.g))
            throw InvalidArgument("bath.discrete.modes[" + std::to_string(i) + "]: k and g must be finite");
    }
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw InvalidArgument("bath.discrete.temperature: must be non-negative");
    if (!is_symmetric())
        throw InvalidArgument("bath.discrete.modes: mode set is not +-k symmetric");
}

DenseOperator qubit_coupling_op(const QubitLattice& lattice, std::size_t l) {
    if (l >= lattice.size())
        throw InvalidArgument("qubit_coupling_op: qubit index " + std::to_string(l) + " out of range");
    const HilbertSpace q = qubit_space(lattice.size());
    const DenseOperator single = Complex(lattice.lambda1) * pauli(PauliAxis::x) +
                                 Complex(lattice.lambda2) * pauli(PauliAxis::y);
    return embed(single, l, q);
}

ModelHamiltonian build_hamiltonian(const QubitLattice& lattice, const BathModeSet& modes, std::size_t n_max) {
    lattice.validate();
    modes.validate();
    if (n_max < 1) throw InvalidArgument("n_max: must be >= 1");

    const std::size_t nq = lattice.size();
    const HilbertSpace q = qubit_space(nq);
    const HilbertSpace e(std::vector<std::size_t>(modes.size(), n_max + 1));
    const auto bos = boson_ops(n_max);
    const Complex i(0.0, 1.0);

    ModelHamiltonian m;
    m.space = concat(q, e);
    m.num_qubits = nq;
    m.n_max = n_max;

    m.h0_system = DenseOperator::zero(q);
    for (std::size_t l = 0; l < nq; ++l) {
        m.h0_system += Complex(0.5 * lattice.splitting(l)) * embed(pauli(PauliAxis::z), l, q);
        m.frequency_scale = std::max(m.frequency_scale, std::abs(lattice.splitting(l)));
    }

    std::vector<DenseOperator> a_env, ad_env;
    auto h_bath = DenseOperator::zero(e);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        a_env.push_back(embed(bos.a, k, e));
        ad_env.push_back(embed(bos.a_dagger, k, e));
        h_bath += Complex(modes.modes[k].omega) * embed(bos.number, k, e);
        m.frequency_scale = std::max(m.frequency_scale, modes.modes[k].omega);
    }

    m.h_i = DenseOperator::zero(m.space);
    for (std::size_t l = 0; l < nq; ++l) {
        auto b = DenseOperator::zero(e);
        const double r = lattice.positions[l];
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const auto& mode = modes.modes[k];
            if (mode.g == 0.0) continue;
            const Complex phase = std::exp(-i * mode.k * r);
            b += (mode.g * phase) * a_env[k] + (mode.g * std::conj(phase)) * ad_env[k];
        }
        m.h_i += kron(qubit_coupling_op(lattice, l), b);
    }
    m.h0 = kron(m.h0_system, DenseOperator::identity(e));
    m.h_env = kron(DenseOperator::identity(q), h_bath);
    return m;
}

DenseOperator thermal_env_state(const BathModeSet& modes, std::size_t n_max) {
    if (modes.modes.empty()) throw InvalidArgument("thermal_env_state: no modes");
    DenseOperator rho = thermal_boson_state(modes.modes.front().omega, modes.temperature, n_max);
    for (std::size_t k = 1; k < modes.size(); ++k)
        rho = kron(rho, thermal_boson_state(modes.modes[k].omega, modes.temperature, n_max));
    return rho;
}

double correlation_fn_discrete(const BathModeSet& modes, double delta_r) {
    double s = 0.0;
    for (const auto& m : modes.modes)
        s += m.g * m.g * std::cos(m.k * delta_r) * coth_factor(m.omega, modes.temperature);
    return 2.0 * s;
}

CorrelationFn discrete_correlation(const BathModeSet& modes) {
    return [modes](double delta) { return correlation_fn_discrete(modes, delta); };
}

Eigen::MatrixXd coupling_covariance(const QubitLattice& lattice, const DenseOperator& rho_s) {
    require_qubit_density(lattice, rho_s, "coupling_covariance");
    const auto ops = coupling_ops(lattice);
    const auto n = static_cast<Eigen::Index>(lattice.size());
    std::vector<Complex> mean(lattice.size());
    for (std::size_t l = 0; l < lattice.size(); ++l) mean[l] = (rho_s * ops[l]).trace();
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const Complex v = (rho_s.matrix() * ops[static_cast<std::size_t>(a)].matrix() *
                               ops[static_cast<std::size_t>(b)].matrix())
                                  .trace() -
                              mean[static_cast<std::size_t>(a)] * mean[static_cast<std::size_t>(b)];
            if (std::abs(v.imag()) > 1e-10)
                throw NumericalError("coupling_covariance: imaginary residue " + std::to_string(v.imag()) +
                                     " for qubits " + std::to_string(a) + "," + std::to_string(b));
            c(a, b) = v.real();
        }
    return c;
}

double decoherence_rate(const QubitLattice& lattice, const CorrelationFn& omega2, const DenseOperator& rho_s) {
    lattice.validate();
    const Eigen::MatrixXd c = coupling_covariance(lattice, rho_s);
    double rate = 0.0;
    for (Eigen::Index a = 0; a < c.rows(); ++a)
        for (Eigen::Index b = 0; b < c.cols(); ++b)
            rate += omega2(lattice.positions[static_cast<std::size_t>(a)] -
                           lattice.positions[static_cast<std::size_t>(b)]) *
                    c(a, b);
    return rate;
}

double decoherence_rate(const QubitLattice& lattice, const BathModeSet& modes, const DenseOperator& rho_s) {
    modes.validate();
    return decoherence_rate(lattice, discrete_correlation(modes), rho_s);
}

Ket coupling_eigenstate(const QubitLattice& lattice, int sign) {
    const double lam = lattice.coupling_norm();
    if (!(lam > 0.0)) throw InvalidArgument("coupling eigenbasis undefined for lambda1 = lambda2 = 0");
    const double phi = std::atan2(lattice.lambda2, lattice.lambda1);
    Vector v(2);
    v << 1.0, static_cast<double>(sign > 0 ? 1 : -1) * std::polar(1.0, phi);
    return Ket::normalized(HilbertSpace{2}, std::move(v));
}

Ket logical_in_coupling_basis(const Ket& logical, const QubitLattice& lattice) {
    const std::size_t nl = logical.space().num_factors();
    if (!(logical.space() == qubit_space(nl))) throw InvalidArgument("logical state must be a qubit register");
    const Ket minus = coupling_eigenstate(lattice, -1), plus = coupling_eigenstate(lattice, +1);
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << nl);
    Vector out = Vector::Zero(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        const Complex c = logical.amplitudes()(b);
        if (c == Complex(0.0, 0.0)) continue;
        Vector term = Vector::Ones(1);
        for (std::size_t j = 0; j < nl; ++j) {
            const bool one = (b >> (nl - 1 - j)) & 1;
            term = kron(Matrix(term), Matrix((one ? plus : minus).amplitudes()));
        }
        out += c * term;
    }
    return Ket::normalized(qubit_space(nl), std::move(out));
}

Ket pair_encode(const Ket& logical, const QubitLattice& lattice) {
    if (lattice.size() % 2 != 0) throw InvalidArgument("pair_encode: odd physical qubit count");
    const std::size_t nl = logical.space().num_factors();
    if (!(logical.space() == qubit_space(nl))) throw InvalidArgument("pair_encode: logical state must be a qubit register");
    if (2 * nl != lattice.size())
        throw InvalidArgument("pair_encode: " + std::to_string(nl) + " logical qubits need " + std::to_string(2 * nl) +
                              " physical qubits, lattice has " + std::to_string(lattice.size()));
    const Ket minus = coupling_eigenstate(lattice, -1), plus = coupling_eigenstate(lattice, +1);
    const Vector zero_pair = pair_vector(minus, plus, false), one_pair = pair_vector(minus, plus, true);
    const auto ldim = static_cast<Eigen::Index>(std::size_t{1} << nl);
    Vector out = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << (2 * nl)));
    for (Eigen::Index b = 0; b < ldim; ++b) {
        const Complex c = logical.amplitudes()(b);
        if (c == Complex(0.0, 0.0)) continue;
        Vector term = Vector::Ones(1);
        for (std::size_t j = 0; j < nl; ++j) {
            const bool one = (b >> (nl - 1 - j)) & 1;
            term = kron(Matrix(term), Matrix(one ? one_pair : zero_pair));
        }
        out += c * term;
    }
    return Ket::normalized(qubit_space(2 * nl), std::move(out));
}

PairRateReport pair_rate(const QubitLattice& lattice, const CorrelationFn& omega2, const DenseOperator& rho_s) {
    lattice.validate();
    if (lattice.size() % 2 != 0) throw InvalidArgument("pair_rate: odd physical qubit count");
    const Eigen::MatrixXd c = coupling_covariance(lattice, rho_s);
    const std::size_t np = lattice.size() / 2;
    const auto& r = lattice.positions;

    PairRateReport rep;
    const double at_zero = omega2(0.0);
    for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t q = 0; q < np; ++q) {
            const double cp = 0.5 * (r[2 * p] + r[2 * p + 1]);
            const double cq = 0.5 * (r[2 * q] + r[2 * q + 1]);
            double cov = 0.0;
            for (std::size_t a = 2 * p; a < 2 * p + 2; ++a)
                for (std::size_t b = 2 * q; b < 2 * q + 2; ++b)
                    cov += c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            rep.collective_rate += omega2(cp - cq) * cov;
        }
        if (at_zero != 0.0)
            rep.intra_pair_variation = std::max(rep.intra_pair_variation,
                                                std::abs(at_zero - omega2(r[2 * p + 1] - r[2 * p])) / std::abs(at_zero));
    }
    rep.physical_rate = decoherence_rate(lattice, omega2, rho_s);
    return rep;
}

PairRateReport pair_rate(const QubitLattice& lattice, const BathModeSet& modes, const DenseOperator& rho_s) {
    modes.validate();
    return pair_rate(lattice, discrete_correlation(modes), rho_s);
}

} // namespace decolab
