#include "decolab/operator_core.hpp"

#include "decolab/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace decolab {

namespace {

std::string dims_string(const HilbertSpace& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.num_factors(); ++i) {
        if (i) out += ",";
        out += std::to_string(s.factor(i));
    }
    return out + "]";
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
    if (!(a == b))
        throw InvalidArgument(std::string(what) + ": space mismatch " + dims_string(a) + " vs " +
                              dims_string(b));
}

bool is_diagonal(const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// HilbertSpace

HilbertSpace::HilbertSpace(std::vector<std::size_t> factor_dims) : dims_(std::move(factor_dims)) {
    for (auto d : dims_) {
        if (d == 0) throw InvalidArgument("HilbertSpace: factor dimension must be positive");
        total_ *= d;
    }
}

HilbertSpace HilbertSpace::slice(std::size_t first, std::size_t count) const {
    if (first + count > dims_.size()) throw InvalidArgument("HilbertSpace::slice: out of range");
    return HilbertSpace(std::vector<std::size_t>(dims_.begin() + static_cast<std::ptrdiff_t>(first),
                                                 dims_.begin() + static_cast<std::ptrdiff_t>(first + count)));
}

HilbertSpace HilbertSpace::select(const std::set<std::size_t>& factors) const {
    std::vector<std::size_t> out;
    for (auto f : factors) {
        if (f >= dims_.size())
            throw InvalidArgument("factor index " + std::to_string(f) + " out of range for " +
                                  std::to_string(dims_.size()) + " factors");
        out.push_back(dims_[f]);
    }
    return HilbertSpace(std::move(out));
}

HilbertSpace concat(const HilbertSpace& a, const HilbertSpace& b) {
    auto d = a.factor_dims();
    d.insert(d.end(), b.factor_dims().begin(), b.factor_dims().end());
    return HilbertSpace(std::move(d));
}

// ---------------------------------------------------------------------------
// DenseOperator

DenseOperator::DenseOperator(HilbertSpace space, Matrix entries)
    : space_(std::move(space)), m_(std::move(entries)) {
    const auto n = static_cast<Eigen::Index>(space_.total());
    if (m_.rows() != n || m_.cols() != n)
        throw InvalidArgument("DenseOperator: matrix is " + std::to_string(m_.rows()) + "x" +
                              std::to_string(m_.cols()) + " but space " + dims_string(space_) +
                              " has dimension " + std::to_string(n));
}

DenseOperator DenseOperator::identity(const HilbertSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.total());
    return {space, Matrix::Identity(n, n)};
}

DenseOperator DenseOperator::zero(const HilbertSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.total());
    return {space, Matrix::Zero(n, n)};
}

bool DenseOperator::is_hermitian(double tol) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool DenseOperator::is_density(double tol) const {
    if (!is_hermitian(kHermitianTol)) return false;
    if (std::abs(m_.trace() - Complex(1.0, 0.0)) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.info() == Eigen::Success && es.eigenvalues().minCoeff() >= -kPositiveTol;
}

DenseOperator& DenseOperator::operator+=(const DenseOperator& rhs) {
    require_same_space(space_, rhs.space_, "operator+");
    m_ += rhs.m_;
    return *this;
}

DenseOperator& DenseOperator::operator-=(const DenseOperator& rhs) {
    require_same_space(space_, rhs.space_, "operator-");
    m_ -= rhs.m_;
    return *this;
}

DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
    require_same_space(a.space_, b.space_, "operator*");
    return {a.space_, a.m_ * b.m_};
}

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(HilbertSpace space, Vector amplitudes) : space_(std::move(space)), v_(std::move(amplitudes)) {
    if (v_.size() != static_cast<Eigen::Index>(space_.total()))
        throw InvalidArgument("Ket: amplitude count " + std::to_string(v_.size()) +
                              " does not match space " + dims_string(space_));
    if (std::abs(v_.norm() - 1.0) > kNormTol)
        throw InvalidArgument("Ket: norm " + std::to_string(v_.norm()) + " differs from 1");
}

Ket Ket::normalized(HilbertSpace space, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("Ket: zero or non-finite vector");
    amplitudes /= n;
    return {std::move(space), std::move(amplitudes)};
}

Ket Ket::basis(const HilbertSpace& space, std::size_t index) {
    if (index >= space.total()) throw InvalidArgument("Ket::basis: index out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(space.total()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return {space, std::move(v)};
}

DenseOperator Ket::projector() const { return {space_, v_ * v_.adjoint()}; }

Complex Ket::expectation(const DenseOperator& op) const {
    require_same_space(space_, op.space(), "Ket::expectation");
    return v_.dot(op.matrix() * v_);
}

// ---------------------------------------------------------------------------
// Products

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
    return {concat(a.space(), b.space()), kron(a.matrix(), b.matrix())};
}

Ket kron(const Ket& a, const Ket& b) {
    Vector v(a.amplitudes().size() * b.amplitudes().size());
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
        v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
    return Ket::normalized(concat(a.space(), b.space()), std::move(v));
}

DenseOperator apply(const DenseOperator& u, const DenseOperator& rho) {
    require_same_space(u.space(), rho.space(), "apply");
    return {rho.space(), u.matrix() * rho.matrix() * u.matrix().adjoint()};
}

Ket apply(const DenseOperator& op, const Ket& psi) {
    require_same_space(op.space(), psi.space(), "apply");
    return Ket::normalized(psi.space(), op.matrix() * psi.amplitudes());
}

// ---------------------------------------------------------------------------
// Partial trace

DenseOperator partial_trace_any(const DenseOperator& op, const std::set<std::size_t>& keep) {
    const auto& space = op.space();
    const HilbertSpace kept = space.select(keep);
    std::set<std::size_t> traced_set;
    for (std::size_t f = 0; f < space.num_factors(); ++f)
        if (!keep.count(f)) traced_set.insert(f);
    const HilbertSpace traced = space.select(traced_set);

    const std::size_t n = space.total();
    const std::size_t nf = space.num_factors();
    std::vector<std::size_t> kidx(n), tidx(n), digits(nf, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = 0, t = 0;
        for (std::size_t f = 0; f < nf; ++f) {
            if (keep.count(f))
                k = k * space.factor(f) + digits[f];
            else
                t = t * space.factor(f) + digits[f];
        }
        kidx[i] = k;
        tidx[i] = t;
        for (std::size_t f = nf; f-- > 0;) {
            if (++digits[f] < space.factor(f)) break;
            digits[f] = 0;
        }
    }

    std::vector<std::vector<std::size_t>> groups(traced.total());
    for (std::size_t i = 0; i < n; ++i) groups[tidx[i]].push_back(i);

    const auto nk = static_cast<Eigen::Index>(kept.total());
    Matrix out = Matrix::Zero(nk, nk);
    const Matrix& m = op.matrix();
    for (const auto& g : groups)
        for (auto i : g)
            for (auto j : g)
                out(static_cast<Eigen::Index>(kidx[i]), static_cast<Eigen::Index>(kidx[j])) +=
                    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return {kept, std::move(out)};
}

DenseOperator partial_trace(const DenseOperator& rho, const std::set<std::size_t>& keep) {
    if (!rho.is_density(1e-10)) throw InvalidArgument("partial_trace: input is not a density");
    return partial_trace_any(rho, keep);
}

// ---------------------------------------------------------------------------
// Propagators

HermitianPropagator::HermitianPropagator(const DenseOperator& h) : space_(h.space()) {
    if (!h.is_hermitian(1e-10)) throw InvalidArgument("herm_propagator: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("herm_propagator: eigendecomposition failed");
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

DenseOperator HermitianPropagator::at(double t) const {
    Vector phase(evals_.size());
    for (Eigen::Index i = 0; i < evals_.size(); ++i) phase(i) = std::polar(1.0, -evals_(i) * t);
    return {space_, evecs_ * phase.asDiagonal() * evecs_.adjoint()};
}

DenseOperator herm_propagator(const DenseOperator& h, double t) { return HermitianPropagator(h).at(t); }

// ---------------------------------------------------------------------------
// Thermal oscillator

namespace {
double boltzmann_ratio(double omega, double temperature) {
    if (!(omega > 0.0)) throw InvalidArgument("thermal state: omega must be positive");
    if (temperature < 0.0) throw InvalidArgument("thermal state: temperature must be non-negative");
    return temperature == 0.0 ? 0.0 : std::exp(-omega / temperature);
}

std::vector<double> gibbs_populations(double omega, double temperature, std::size_t n_max) {
    const double r = boltzmann_ratio(omega, temperature);
    std::vector<double> p(n_max + 1);
    double w = 1.0, z = 0.0;
    for (auto& x : p) {
        x = w;
        z += w;
        w *= r;
    }
    for (auto& x : p) x /= z;
    return p;
}
} // namespace

DenseOperator thermal_boson_state(double omega, double temperature, std::size_t n_max) {
    if (n_max < 1) throw InvalidArgument("thermal_boson_state: n_max must be >= 1");
    const auto p = gibbs_populations(omega, temperature, n_max);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_max + 1), static_cast<Eigen::Index>(n_max + 1));
    for (std::size_t n = 0; n <= n_max; ++n) m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = p[n];
    return {HilbertSpace{n_max + 1}, std::move(m)};
}

double thermal_tail_weight(double omega, double temperature, std::size_t n_max) {
    const double r = boltzmann_ratio(omega, temperature);
    return std::pow(r, static_cast<double>(n_max + 1));
}

std::size_t choose_n_max(double omega, double temperature, double tail_tol) {
    const double r = boltzmann_ratio(omega, temperature);
    if (r == 0.0) return 1;
    const double needed = std::log(tail_tol) / std::log(r); // n_max + 1 > needed
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(needed)));
}

double truncated_coth(double omega, double temperature, std::size_t n_max) {
    const auto p = gibbs_populations(omega, temperature, n_max);
    double s = 0.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double up = n < n_max ? static_cast<double>(n + 1) : 0.0;
        s += p[n] * (up + static_cast<double>(n));
    }
    return s;
}

double coth_factor(double omega, double temperature) {
    if (temperature < 0.0) throw InvalidArgument("coth_factor: temperature must be non-negative");
    if (temperature == 0.0) return 1.0;
    const double x = omega / (2.0 * temperature);
    return 1.0 / std::tanh(x);
}

// ---------------------------------------------------------------------------
// Canonical operators

BosonOps boson_ops(std::size_t n_max) {
    if (n_max < 1) throw InvalidArgument("boson_ops: n_max must be >= 1");
    const auto n = static_cast<Eigen::Index>(n_max + 1);
    Matrix a = Matrix::Zero(n, n), num = Matrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    for (Eigen::Index k = 0; k < n; ++k) num(k, k) = static_cast<double>(k);
    HilbertSpace s{n_max + 1};
    Matrix ad = a.adjoint();
    return {DenseOperator(s, std::move(a)), DenseOperator(s, std::move(ad)), DenseOperator(s, std::move(num))};
}

DenseOperator pauli(PauliAxis axis) {
    Matrix m(2, 2);
    const Complex i(0.0, 1.0);
    switch (axis) {
    case PauliAxis::x: m << 0.0, 1.0, 1.0, 0.0; break;
    case PauliAxis::y: m << 0.0, -i, i, 0.0; break;
    case PauliAxis::z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return {HilbertSpace{2}, std::move(m)};
}

DenseOperator pauli(char axis) {
    switch (axis) {
    case 'x': return pauli(PauliAxis::x);
    case 'y': return pauli(PauliAxis::y);
    case 'z': return pauli(PauliAxis::z);
    default: throw InvalidArgument(std::string("pauli: unknown axis '") + axis + "'");
    }
}

DenseOperator embed(const DenseOperator& op, std::size_t factor_index, const HilbertSpace& space) {
    if (factor_index >= space.num_factors()) throw InvalidArgument("embed: factor index out of range");
    if (op.dim() != space.factor(factor_index))
        throw InvalidArgument("embed: operator dimension " + std::to_string(op.dim()) +
                              " does not match factor " + std::to_string(factor_index) + " of " +
                              dims_string(space));
    std::size_t left = 1, right = 1;
    for (std::size_t f = 0; f < factor_index; ++f) left *= space.factor(f);
    for (std::size_t f = factor_index + 1; f < space.num_factors(); ++f) right *= space.factor(f);
    const auto l = static_cast<Eigen::Index>(left), r = static_cast<Eigen::Index>(right);
    Matrix m = kron(kron(Matrix::Identity(l, l), op.matrix()), Matrix::Identity(r, r));
    return {space, std::move(m)};
}

// ---------------------------------------------------------------------------
// Purification

Ket purify(const DenseOperator& rho_s) {
    if (!rho_s.is_density(1e-10)) throw InvalidArgument("purify: input is not a positive unit-trace density");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_s.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("purify: eigendecomposition failed");
    const auto n = static_cast<Eigen::Index>(rho_s.dim());
    Vector psi = Vector::Zero(n * n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index src = n - 1 - r; // descending eigenvalues
        const double p = std::max(0.0, es.eigenvalues()(src));
        psi.segment(r * n, n) = std::sqrt(p) * es.eigenvectors().col(src);
    }
    return Ket::normalized(concat(HilbertSpace{rho_s.dim()}, rho_s.space()), std::move(psi));
}

// ---------------------------------------------------------------------------
// Variance form

DenseOperator system_average(const DenseOperator& h, const DenseOperator& rho_s) {
    const auto& hs = h.space();
    const auto ns = rho_s.space().num_factors();
    if (hs.num_factors() <= ns || !(hs.slice(0, ns) == rho_s.space()))
        throw InvalidArgument("system_average: coupling space " + dims_string(hs) +
                              " does not start with system space " + dims_string(rho_s.space()));
    const HilbertSpace env = hs.slice(ns, hs.num_factors() - ns);
    const auto ds = static_cast<Eigen::Index>(rho_s.dim());
    const auto de = static_cast<Eigen::Index>(env.total());
    Matrix m = Matrix::Zero(de, de);
    const Matrix& hm = h.matrix();
    for (Eigen::Index s = 0; s < ds; ++s)
        for (Eigen::Index sp = 0; sp < ds; ++sp) {
            const Complex w = rho_s.matrix()(sp, s);
            if (w != Complex(0.0, 0.0)) m.noalias() += w * hm.block(s * de, sp * de, de, de);
        }
    return {env, std::move(m)};
}

double coupling_second_moment(const DenseOperator& h_i, const DenseOperator& rho_s, const DenseOperator& rho_env) {
    if (!(h_i.space() == concat(rho_s.space(), rho_env.space())))
        throw InvalidArgument("variance_form: coupling space " + dims_string(h_i.space()) +
                              " is not system " + dims_string(rho_s.space()) + " (x) environment " +
                              dims_string(rho_env.space()));
    const auto ds = static_cast<Eigen::Index>(rho_s.dim());
    const auto de = static_cast<Eigen::Index>(rho_env.dim());
    const Matrix& h = h_i.matrix();
    const Matrix& re = rho_env.matrix();
    const Matrix& rs = rho_s.matrix();
    const bool env_diag = is_diagonal(re);

    // X = (rho_s (x) rho_env) H, built factor by factor; <H^2> = tr(X H).
    Matrix y(h.rows(), h.cols());
    for (Eigen::Index s = 0; s < ds; ++s) {
        if (env_diag)
            y.middleRows(s * de, de) = re.diagonal().asDiagonal() * h.middleRows(s * de, de);
        else
            y.middleRows(s * de, de).noalias() = re * h.middleRows(s * de, de);
    }
    Matrix x = Matrix::Zero(h.rows(), h.cols());
    for (Eigen::Index s = 0; s < ds; ++s)
        for (Eigen::Index sp = 0; sp < ds; ++sp) {
            const Complex w = rs(s, sp);
            if (w != Complex(0.0, 0.0)) x.middleRows(s * de, de) += w * y.middleRows(sp * de, de);
        }
    return x.cwiseProduct(h.transpose()).sum().real();
}

double env_square_expectation(const DenseOperator& m, const DenseOperator& rho_env) {
    if (!(m.space() == rho_env.space())) throw InvalidArgument("env_square_expectation: space mismatch");
    const Matrix& mm = m.matrix();
    const Matrix& re = rho_env.matrix();
    if (is_diagonal(re)) {
        double s = 0.0;
        for (Eigen::Index e = 0; e < re.rows(); ++e)
            s += re(e, e).real() * mm.row(e).transpose().cwiseProduct(mm.col(e)).sum().real();
        return s;
    }
    return (re * mm).cwiseProduct(mm.transpose()).sum().real();
}

double variance_form(const DenseOperator& h_i, const DenseOperator& rho_s, const DenseOperator& rho_env) {
    const double h2 = coupling_second_moment(h_i, rho_s, rho_env);
    const double m2 = env_square_expectation(system_average(h_i, rho_s), rho_env);
    const double v = h2 - m2;
    if (v < -1e-9 * std::max(1.0, std::abs(h2)))
        throw NumericalError("variance_form: negative variance " + std::to_string(v));
    return std::max(0.0, v);
}

} // namespace decolab
