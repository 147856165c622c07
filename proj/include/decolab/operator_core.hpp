// operator_core.hpp: dense operator algebra on small composite Hilbert spaces
//
// Tensor products, partial traces, Hermitian propagators, canonical single-
// factor operators (Pauli, truncated boson ladder), thermal oscillator states,
// purification and the system/environment variance form that every
// second-order damping coefficient reduces to.
//
// Units: hbar = k_B = 1.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <span>
#include <vector>

namespace decolab {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol     = 1e-12;
inline constexpr double kPositiveTol  = 1e-10;
inline constexpr double kNormTol      = 1e-12;

// Ordered list of tensor-factor dimensions. Factor 0 is the most significant
// index of the flattened basis (row-major Kronecker convention).
class HilbertSpace {
public:
    HilbertSpace() = default;
    explicit HilbertSpace(std::vector<std::size_t> factor_dims);
    HilbertSpace(std::initializer_list<std::size_t> factor_dims)
        : HilbertSpace(std::vector<std::size_t>(factor_dims)) {}

    const std::vector<std::size_t>& factor_dims() const noexcept { return dims_; }
    std::size_t num_factors() const noexcept { return dims_.size(); }
    std::size_t factor(std::size_t i) const { return dims_.at(i); }
    std::size_t total() const noexcept { return total_; }

    // Factors [first, first + count) as a new space.
    HilbertSpace slice(std::size_t first, std::size_t count) const;
    HilbertSpace select(const std::set<std::size_t>& factors) const;

    friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 1;
};

HilbertSpace concat(const HilbertSpace& a, const HilbertSpace& b);

// Complex square matrix bound to a HilbertSpace.
class DenseOperator {
public:
    DenseOperator() = default;
    DenseOperator(HilbertSpace space, Matrix entries);

    static DenseOperator identity(const HilbertSpace& space);
    static DenseOperator zero(const HilbertSpace& space);

    const HilbertSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return space_.total(); }

    Complex trace() const { return m_.trace(); }
    DenseOperator adjoint() const { return {space_, m_.adjoint()}; }

    bool is_hermitian(double tol = kHermitianTol) const;
    // Hermitian, unit trace and eigenvalues >= -kPositiveTol.
    bool is_density(double tol = kTraceTol) const;

    DenseOperator& operator+=(const DenseOperator& rhs);
    DenseOperator& operator-=(const DenseOperator& rhs);
    DenseOperator& operator*=(Complex s) { m_ *= s; return *this; }

    friend DenseOperator operator+(DenseOperator a, const DenseOperator& b) { return a += b; }
    friend DenseOperator operator-(DenseOperator a, const DenseOperator& b) { return a -= b; }
    friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b);
    friend DenseOperator operator*(Complex s, DenseOperator a) { return a *= s; }
    friend DenseOperator operator*(DenseOperator a, Complex s) { return a *= s; }

private:
    HilbertSpace space_;
    Matrix m_;
};

// Normalized state vector.
class Ket {
public:
    Ket() = default;
    // Throws unless |amplitudes| = 1 within kNormTol.
    Ket(HilbertSpace space, Vector amplitudes);
    // Rescales a nonzero vector to unit norm.
    static Ket normalized(HilbertSpace space, Vector amplitudes);
    static Ket basis(const HilbertSpace& space, std::size_t index);

    const HilbertSpace& space() const noexcept { return space_; }
    const Vector& amplitudes() const noexcept { return v_; }
    std::size_t dim() const noexcept { return space_.total(); }

    DenseOperator projector() const;
    Complex expectation(const DenseOperator& op) const;

private:
    HilbertSpace space_;
    Vector v_;
};

DenseOperator kron(const DenseOperator& a, const DenseOperator& b);
Ket kron(const Ket& a, const Ket& b);
Matrix kron(const Matrix& a, const Matrix& b);

DenseOperator apply(const DenseOperator& u, const DenseOperator& rho); // u rho u^dagger
Ket apply(const DenseOperator& op, const Ket& psi);                     // normalized result

// Trace out every factor not listed in `keep`. The kept factors retain their
// relative order. `rho` must be a density.
DenseOperator partial_trace(const DenseOperator& rho, const std::set<std::size_t>& keep);
// Same contraction without the density precondition.
DenseOperator partial_trace_any(const DenseOperator& op, const std::set<std::size_t>& keep);

// exp(-i h t), decomposed once and exponentiated per call.
class HermitianPropagator {
public:
    explicit HermitianPropagator(const DenseOperator& h);

    DenseOperator at(double t) const;
    const Eigen::VectorXd& eigenvalues() const noexcept { return evals_; }
    const Matrix& eigenvectors() const noexcept { return evecs_; }
    const HilbertSpace& space() const noexcept { return space_; }

private:
    HilbertSpace space_;
    Eigen::VectorXd evals_;
    Matrix evecs_;
};

DenseOperator herm_propagator(const DenseOperator& h, double t);

// Fock-diagonal Gibbs state on n_max + 1 levels, renormalized after
// truncation. temperature == 0 gives the vacuum.
DenseOperator thermal_boson_state(double omega, double temperature, std::size_t n_max);
// Weight of the untruncated Gibbs distribution above n_max.
double thermal_tail_weight(double omega, double temperature, std::size_t n_max);
// Smallest n_max >= 1 whose untruncated tail weight is below `tail_tol`.
std::size_t choose_n_max(double omega, double temperature, double tail_tol = 1e-10);
// <a a^dag + a^dag a> in the truncated, renormalized Gibbs state; tends to
// coth(omega / 2T) as n_max grows.
double truncated_coth(double omega, double temperature, std::size_t n_max);
// coth(omega / 2T), equal to 1 at T = 0.
double coth_factor(double omega, double temperature);

struct BosonOps {
    DenseOperator a;
    DenseOperator a_dagger;
    DenseOperator number;
};
BosonOps boson_ops(std::size_t n_max);

enum class PauliAxis { x, y, z };
DenseOperator pauli(PauliAxis axis);
DenseOperator pauli(char axis); // 'x', 'y' or 'z'

// Place a single-factor operator at `factor_index` of `space`, identity elsewhere.
DenseOperator embed(const DenseOperator& op, std::size_t factor_index, const HilbertSpace& space);

// Ket on ancilla(n) (x) system(n), Schmidt coefficients sqrt(p_i) in
// decreasing order, so a pure input maps to |0>_r (x) |psi>_s.
Ket purify(const DenseOperator& rho_s);

// <H^2>_{s,env} - < <H>_s^2 >_env, where <H>_s = tr_s((rho_s (x) 1) H) is an
// environment operator. `h_i` lives on rho_s.space() ++ rho_env.space().
double variance_form(const DenseOperator& h_i, const DenseOperator& rho_s, const DenseOperator& rho_env);

// tr_s((rho_s (x) 1) H): the system-averaged coupling, an environment operator.
DenseOperator system_average(const DenseOperator& h, const DenseOperator& rho_s);
// <H^2>_{s,env} = tr[(rho_s (x) rho_env) H^2].
double coupling_second_moment(const DenseOperator& h_i, const DenseOperator& rho_s, const DenseOperator& rho_env);
// tr(rho_env M^2).
double env_square_expectation(const DenseOperator& m, const DenseOperator& rho_env);

} // namespace decolab
