// qubit_bath.hpp: L qubits on a 1D chain coupled to a plane-wave boson bath
//
//   H = sum_l (w0_l / 2) sigma^z_l
//     + sum_{l,k} g_k (e^{-i k r_l} a_k + e^{i k r_l} a_k^dag) (lambda1 sigma^x_l + lambda2 sigma^y_l)
//     + sum_k omega_k a_k^dag a_k
//
// plus the factorized damping rate sum_{l1,l2} Omega^2(r_l1 - r_l2) <dA_l1 dA_l2>
// and the qubit-pair encoding that annihilates every collective coupling.

#pragma once

#include "decolab/operator_core.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace decolab {

struct QubitLattice {
    std::vector<double> positions; // strictly increasing
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    std::vector<double> h0_splittings; // empty means all zero

    std::size_t size() const noexcept { return positions.size(); }
    double coupling_norm() const; // sqrt(lambda1^2 + lambda2^2)
    double splitting(std::size_t l) const { return h0_splittings.empty() ? 0.0 : h0_splittings.at(l); }
    void validate() const;
};

struct BathMode {
    double k = 0.0;     // wavevector
    double omega = 1.0; // frequency, > 0
    double g = 0.0;     // real coupling amplitude
};

struct BathModeSet {
    std::vector<BathMode> modes;
    double temperature = 0.0;

    std::size_t size() const noexcept { return modes.size(); }
    // Every k != 0 mode has a (-k, omega, g) partner.
    bool is_symmetric(double tol = 1e-12) const;
    void validate() const;
};

// Composite space layout: [qubit 0 .. qubit L-1 (dim 2), mode 0 .. mode K-1 (dim n_max + 1)].
struct ModelHamiltonian {
    HilbertSpace space;
    std::size_t num_qubits = 0;
    std::size_t n_max = 0;
    DenseOperator h0, h_i, h_env;
    DenseOperator h0_system; // H0 on the qubit factors alone
    // Largest free frequency (|w0_l|, omega_k); sets the short-time window.
    double frequency_scale = 0.0;

    HilbertSpace system_space() const { return space.slice(0, num_qubits); }
    HilbertSpace env_space() const { return space.slice(num_qubits, space.num_factors() - num_qubits); }
    DenseOperator total() const { return h0 + h_i + h_env; }
};

using CorrelationFn = std::function<double(double delta_r)>;

// lambda1 sigma^x_l + lambda2 sigma^y_l on the L-qubit space.
DenseOperator qubit_coupling_op(const QubitLattice& lattice, std::size_t l);

ModelHamiltonian build_hamiltonian(const QubitLattice& lattice, const BathModeSet& modes, std::size_t n_max);

// Product of per-mode truncated Gibbs states on the model's environment factors.
DenseOperator thermal_env_state(const BathModeSet& modes, std::size_t n_max);

// Omega^2(delta) = 2 sum_k g_k^2 cos(k delta) coth(omega_k / 2T).
double correlation_fn_discrete(const BathModeSet& modes, double delta_r);
CorrelationFn discrete_correlation(const BathModeSet& modes);

// C_{l1 l2} = Re <dA_l1 dA_l2>_s with dA = A - <A>_s. Throws if an
// imaginary residue above 1e-10 appears.
Eigen::MatrixXd coupling_covariance(const QubitLattice& lattice, const DenseOperator& rho_s);

// sum_{l1,l2} Omega^2(r_l1 - r_l2) <dA_l1 dA_l2>_s, equal to c2 = 1/tau2^2 of
// the entanglement fidelity for a thermal, +-k symmetric bath.
double decoherence_rate(const QubitLattice& lattice, const BathModeSet& modes, const DenseOperator& rho_s);
double decoherence_rate(const QubitLattice& lattice, const CorrelationFn& omega2, const DenseOperator& rho_s);

// Eigenvectors of lambda1 sigma^x + lambda2 sigma^y: index 0 -> eigenvalue
// -|lambda|, index 1 -> +|lambda|.
Ket coupling_eigenstate(const QubitLattice& lattice, int sign);

// Logical qubit j (0 <-> |-1>, 1 <-> |+1> of A) goes to physical qubits
// (2j, 2j+1): |-1> -> |-1,+1>, |+1> -> |+1,-1>.
Ket pair_encode(const Ket& logical, const QubitLattice& lattice);

// Lift a logical state from the 0/1 labels to the A eigenbasis on L qubits
// (no encoding).
Ket logical_in_coupling_basis(const Ket& logical, const QubitLattice& lattice);

struct PairRateReport {
    // sum_{p1,p2} Omega^2(c_p1 - c_p2) <d(A_p1 + A_p1') d(A_p2 + A_p2')>, pair centres c_p.
    double collective_rate = 0.0;
    // Full per-qubit sum on the physical positions; differs from the
    // collective rate only through intra-pair variation of Omega^2.
    double physical_rate = 0.0;
    // max_p |Omega^2(0) - Omega^2(intra-pair spacing)| / |Omega^2(0)|.
    double intra_pair_variation = 0.0;
};

PairRateReport pair_rate(const QubitLattice& lattice, const BathModeSet& modes, const DenseOperator& rho_s);
PairRateReport pair_rate(const QubitLattice& lattice, const CorrelationFn& omega2, const DenseOperator& rho_s);

} // namespace decolab
