// oracle.hpp: brute-force ground truth for the short-time coefficients.
//
// Exact unitary evolution of qubits (x) truncated bath, direct evaluation of
// the input-output, entanglement and average fidelities, and a quartic fit of
// the short-time infidelity that recovers (c1, c2) in the convention
// F = 1 - c1 t - (c2 / 2) t^2 + O(t^3).

#pragma once

#include "decolab/fidelity_expansion.hpp"
#include "decolab/qubit_bath.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace decolab {

struct FidelityCurve {
    std::vector<double> times;
    std::vector<double> values;     // F(t)
    std::vector<double> infidelity; // 1 - F(t), accumulated without the subtraction
};

struct ExpansionEstimate {
    double c1_hat = 0.0;
    double c2_hat = 0.0;
    double residual = 0.0; // max |fit - data| on the infidelity
    double t_max = 0.0;
    std::size_t samples = 0;
    double condition = 0.0; // of the scaled design matrix
    double max_infidelity = 0.0;
    bool converged = false; // residual reached the window tolerance
};

// U rho0 U^dagger, U = exp(-i H_T t).
DenseOperator evolve_exact(const ModelHamiltonian& model, const DenseOperator& rho0, double t);

// One eigendecomposition of H_T and of the free system Hamiltonian, shared by
// every curve evaluated on a model.
struct Dynamics {
    explicit Dynamics(ModelHamiltonian m);

    ModelHamiltonian model;
    HermitianPropagator total;
    HermitianPropagator free_system;
};

std::shared_ptr<const Dynamics> make_dynamics(ModelHamiltonian model);

class FidelityOracle {
public:
    FidelityOracle(std::shared_ptr<const Dynamics> dynamics, const DenseOperator& rho_env);
    FidelityOracle(const ModelHamiltonian& model, const DenseOperator& rho_env);

    FidelityCurve io(const Ket& psi0, std::span<const double> times) const;
    // Purified input; `ancilla_unitary`, if given, acts on the ancilla factor
    // of the purification before evolution.
    FidelityCurve entanglement(const DenseOperator& rho_s, std::span<const double> times,
                               const Matrix* ancilla_unitary = nullptr) const;
    FidelityCurve average(const Ensemble& ensemble, std::span<const double> times) const;

    const Dynamics& dynamics() const { return *dyn_; }

private:
    // Pure state on ancilla(dr) (x) system, ancilla index most significant.
    FidelityCurve extended(const Vector& psi, std::size_t dr, std::span<const double> times) const;

    std::shared_ptr<const Dynamics> dyn_;
    std::vector<double> weights_;  // environment configurations p_n
    std::vector<Vector> configs_;  // and their states e_n
};

FidelityCurve fidelity_curve_io(const ModelHamiltonian& model, const Ket& psi0, const DenseOperator& rho_env,
                                std::span<const double> times);
FidelityCurve fidelity_curve_ent(const ModelHamiltonian& model, const DenseOperator& rho_s,
                                 const DenseOperator& rho_env, std::span<const double> times);
FidelityCurve fidelity_curve_avg(const ModelHamiltonian& model, const Ensemble& ensemble,
                                 const DenseOperator& rho_env, std::span<const double> times);

// t_j = j t_max / (count - 1), j = 0 .. count - 1.
std::vector<double> uniform_times(double t_max, std::size_t count = 9);

// Least-squares fit of 1 - F = b1 t + b2 t^2 + b3 t^3 + b4 t^4. Throws
// NumericalError if the design matrix is singular.
ExpansionEstimate estimate_c2(const FidelityCurve& curve);

struct WindowPolicy {
    double target_infidelity = 1e-4; // at t_max, from the rough rate
    double kappa = 0.025;            // t_max <= kappa / (fastest frequency)
    double residual_tol = 1e-10;
    int max_shrink = 10;
};

using CurveFn = std::function<FidelityCurve(std::span<const double>)>;

// Window selection: rough rate (or a probe when it is not positive) sets the
// initial t_max, which halves until the fit residual meets the tolerance.
ExpansionEstimate fit_short_time(const CurveFn& curve, double c2_rough, double frequency_scale,
                                 const WindowPolicy& policy = {});

enum class VerifyPath { io, entanglement, average, factorized };
std::string to_string(VerifyPath p);

struct Scenario {
    std::string name;
    QubitLattice lattice;
    BathModeSet modes;
    std::size_t n_max = 1;
    VerifyPath path = VerifyPath::io;
    DenseOperator rho_s;                 // always set
    std::optional<Ket> psi;              // io
    std::optional<Ensemble> ensemble;    // average
};

struct VerificationReport {
    std::string scenario;
    VerifyPath path = VerifyPath::io;
    double c2_analytic = 0.0;
    double c2_fitted = 0.0;
    double rel_err = 0.0;
    double abs_floor = 0.0; // differences below this count as agreement
    ExpansionEstimate fit;
    bool truncation_ok = true;
    bool pass = false;
    std::string message;
};

inline constexpr double kVerifyRelTol = 1e-2;

// Upper bound on any c2 of the model: 2 (sum_l |lambda|)^2 sum_k g_k^2 coth_k.
double coupling_rate_scale(const QubitLattice& lattice, const BathModeSet& modes);

// Model shared by scenarios with the same lattice, modes (temperature aside)
// and n_max.
std::string dynamics_key(const Scenario& s);

VerificationReport verify_expansion(const Scenario& scenario, std::shared_ptr<const Dynamics> dynamics = nullptr,
                                    const WindowPolicy& policy = {});

} // namespace decolab
