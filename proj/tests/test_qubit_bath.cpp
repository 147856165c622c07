#include <doctest.h>

#include "decolab/error.hpp"
#include "decolab/fidelity_expansion.hpp"
#include "decolab/qubit_bath.hpp"
#include "decolab/random.hpp"
#include "decolab/spectral.hpp"
#include "decolab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace decolab;

namespace {

QubitLattice chain(std::vector<double> pos, double l1 = 0.8, double l2 = 0.6) {
    QubitLattice q;
    q.positions = std::move(pos);
    q.lambda1 = l1;
    q.lambda2 = l2;
    return q;
}

BathModeSet pair_modes(double k, double omega, double g, double T) {
    BathModeSet m;
    m.modes = {{k, omega, g}, {-k, omega, g}};
    m.temperature = T;
    return m;
}

double dist(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double apply_norm(const DenseOperator& op, const Ket& psi) { return (op.matrix() * psi.amplitudes()).norm(); }

Ket ghz(std::size_t n) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
    v(0) = v(v.size() - 1) = 1.0 / std::numbers::sqrt2;
    return Ket(qubit_register(n), v);
}

} // namespace

TEST_CASE("qubit coupling operator") {
    auto x = qubit_coupling_op(chain({0.0}, 1.0, 0.0), 0);
    CHECK(dist(x.matrix(), pauli('x').matrix()) == 0.0);
    auto y = qubit_coupling_op(chain({0.0}, 0.0, 1.0), 0);
    CHECK(dist(y.matrix(), pauli('y').matrix()) == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(qubit_coupling_op(chain({0.0}, 3.0, 4.0), 0).matrix());
    CHECK(es.eigenvalues()(0) == doctest::Approx(-5.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(5.0));
    auto lat = chain({0.0, 1.0, 2.0});
    CHECK(qubit_coupling_op(lat, 2).dim() == 8);
    CHECK_THROWS(qubit_coupling_op(lat, 3));
}

TEST_CASE("coupling eigenstates") {
    auto lat = chain({0.0});
    auto a = qubit_coupling_op(lat, 0);
    for (int s : {-1, 1}) {
        auto k = coupling_eigenstate(lat, s);
        CHECK(dist(a.matrix() * k.amplitudes(), s * 1.0 * k.amplitudes()) < 1e-14);
    }
}

TEST_CASE("hamiltonian of one qubit and one mode") {
    BathModeSet m;
    m.modes = {{0.0, 1.0, 0.05}};
    auto lat = chain({0.0}, 1.0, 0.0);
    auto h = build_hamiltonian(lat, m, 3);
    auto b = boson_ops(3);
    CHECK(dist(h.h_i.matrix(), kron(pauli('x'), 0.05 * (b.a + b.a_dagger)).matrix()) < 1e-15);
    CHECK(dist(h.h_env.matrix(), kron(DenseOperator::identity(HilbertSpace{2}), b.number).matrix()) < 1e-15);
    CHECK(h.total().is_hermitian());
    CHECK(h.frequency_scale == 1.0);
}

TEST_CASE("hamiltonian hermiticity with phases") {
    auto lat = chain({0.0, 1.3});
    lat.h0_splittings = {1.0, 0.7};
    auto h = build_hamiltonian(lat, pair_modes(0.9, 1.1, 0.05, 0.0), 2);
    CHECK(h.space.total() == 4 * 9);
    CHECK(h.h_i.is_hermitian());
    CHECK(h.total().is_hermitian());
}

TEST_CASE("decoupled spectrum is the sum of subsystem spectra") {
    auto lat = chain({0.0, 1.0});
    lat.h0_splittings = {1.0, 0.4};
    auto modes = pair_modes(1.0, 1.0, 0.0, 0.0);
    modes.modes[1].omega = 1.0;
    const std::size_t n_max = 2;
    auto h = build_hamiltonian(lat, modes, n_max);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.total().matrix());
    std::vector<double> expected;
    for (double s0 : {-0.5, 0.5})
        for (double s1 : {-0.2, 0.2})
            for (std::size_t n0 = 0; n0 <= n_max; ++n0)
                for (std::size_t n1 = 0; n1 <= n_max; ++n1) expected.push_back(s0 + s1 + double(n0) + double(n1));
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(es.eigenvalues()(static_cast<Eigen::Index>(i)) == doctest::Approx(expected[i]).scale(1.0));
}

TEST_CASE("model validation") {
    BathModeSet asym;
    asym.modes = {{1.0, 1.0, 0.05}};
    CHECK_THROWS_AS(build_hamiltonian(chain({0.0}), asym, 2), InvalidArgument);
    CHECK_THROWS_AS(build_hamiltonian(chain({1.0, 0.0}), pair_modes(1, 1, 0.05, 0), 2), InvalidArgument);
    CHECK_THROWS_AS(build_hamiltonian(chain({0.0}), pair_modes(1, -1, 0.05, 0), 2), InvalidArgument);
    CHECK_THROWS_AS(build_hamiltonian(chain({0.0}), pair_modes(1, 1, 0.05, 0), 0), InvalidArgument);
    CHECK(pair_modes(1, 1, 0.05, 0).is_symmetric());
    CHECK_FALSE(asym.is_symmetric());
}

TEST_CASE("discrete correlation function") {
    const double g = 0.05, k = 0.7;
    auto m = pair_modes(k, 1.0, g, 0.0);
    for (double d : {0.0, 0.4, 1.9, 5.0}) {
        CHECK(correlation_fn_discrete(m, d) == doctest::Approx(4 * g * g * std::cos(k * d)).scale(1e-3));
        CHECK(correlation_fn_discrete(m, d) == correlation_fn_discrete(m, -d));
        CHECK(correlation_fn_discrete(m, 0.0) >= std::abs(correlation_fn_discrete(m, d)));
    }
    // coth(omega / 2T) -> 2T / omega as omega / 2T -> 0.
    const double omega = 1.0, T = omega / (2 * 1e-4);
    auto hot = pair_modes(0.0, omega, g, T);
    hot.modes.pop_back();
    const double expected = 2 * g * g * 2 * T / omega;
    CHECK(std::abs(correlation_fn_discrete(hot, 0.0) - expected) / expected < 1e-6);
}

TEST_CASE("decoherence rate examples") {
    const double g = 0.05;
    BathModeSet m;
    m.modes = {{0.0, 1.0, g}};
    auto lat = chain({0.0}, 1.0, 0.0);
    CHECK(decoherence_rate(lat, m, Ket::basis(HilbertSpace{2}, 0).projector()) == doctest::Approx(2 * g * g));
    CHECK(std::abs(decoherence_rate(lat, m, coupling_eigenstate(lat, 1).projector())) < 1e-16);
}

TEST_CASE("far-separated qubits under a broad spectrum decohere independently") {
    // Dense comb of 64 +-k modes with a Gaussian envelope of width 2.
    BathModeSet comb;
    for (int j = 0; j < 32; ++j) {
        const double k = 0.125 * (j + 0.5);
        const double g = 0.01 * std::exp(-k * k / 8.0);
        comb.modes.push_back({k, 1.0 + k, g});
        comb.modes.push_back({-k, 1.0 + k, g});
    }
    auto lat = chain({0.0, 12.0});
    auto rho = ghz(2).projector();
    const double single = correlation_fn_discrete(comb, 0.0) * 1.0; // |lambda|^2 = 1, <A> = 0 in GHZ
    CHECK(decoherence_rate(lat, comb, rho) == doctest::Approx(2 * single).epsilon(1e-3));
}

TEST_CASE("factorized rate equals the closed-form entanglement rate") {
    Xoshiro256 rng(12);
    struct Case {
        std::size_t L;
        BathModeSet modes;
        std::size_t n_max;
    };
    BathModeSet four;
    four.modes = {{0.5, 0.8, 0.05}, {-0.5, 0.8, 0.05}, {1.5, 1.3, 0.04}, {-1.5, 1.3, 0.04}};
    four.temperature = 0.1;
    std::vector<Case> cases = {
        {1, pair_modes(1.0, 1.0, 0.05, 0.5), choose_n_max(1.0, 0.5)},
        {2, pair_modes(1.0, 1.0, 0.05, 0.5), choose_n_max(1.0, 0.5)},
        {2, four, choose_n_max(0.8, 0.1)},
        {3, pair_modes(0.6, 1.0, 0.05, 0.3), choose_n_max(1.0, 0.3)},
    };
    for (const auto& c : cases) {
        std::vector<double> pos;
        for (std::size_t l = 0; l < c.L; ++l) pos.push_back(0.9 * double(l));
        auto lat = chain(pos);
        auto model = build_hamiltonian(lat, c.modes, c.n_max);
        auto env = thermal_env_state(c.modes, c.n_max);
        for (int rep = 0; rep < 3; ++rep) {
            auto rho = rep == 0 ? ghz(c.L).projector() : random_density(qubit_register(c.L), rng);
            const double fact = decoherence_rate(lat, c.modes, rho);
            const double direct = entanglement_c2(rho, model.h_i, env).c2;
            CHECK(std::abs(fact - direct) <= 1e-6 * std::abs(direct));
        }
    }
}

TEST_CASE("delta-correlated bath: rates add over qubits") {
    Xoshiro256 rng(31);
    const double x = 0.003;
    CorrelationFn delta = [x](double d) { return d == 0.0 ? x : 0.0; };
    for (int rep = 0; rep < 10; ++rep) {
        auto lat = chain({0.0, 1.0, 2.5}, rng.uniform(-1, 1), rng.uniform(-1, 1));
        auto rho = random_density(qubit_register(3), rng);
        double sum = 0.0;
        for (std::size_t l = 0; l < 3; ++l) {
            auto single = chain({lat.positions[l]}, lat.lambda1, lat.lambda2);
            sum += decoherence_rate(single, delta, partial_trace(rho, {l}));
        }
        CHECK(std::abs(decoherence_rate(lat, delta, rho) - sum) <= 1e-12 * std::max(1.0, sum));
    }
}

TEST_CASE("rate is translation invariant") {
    auto m = pair_modes(0.8, 1.0, 0.05, 0.5);
    Xoshiro256 rng(40);
    auto rho = random_density(qubit_register(2), rng);
    const double r0 = decoherence_rate(chain({0.0, 1.1}), m, rho);
    CHECK(decoherence_rate(chain({3.7, 4.8}), m, rho) == doctest::Approx(r0).epsilon(1e-12));
}

TEST_CASE("pair encoding annihilates the pair coupling") {
    auto lat = chain({0.0, 0.1});
    HilbertSpace q{2};
    auto check_annihilated = [&](const Ket& logical, const QubitLattice& l) {
        auto enc = pair_encode(logical, l);
        for (std::size_t p = 0; p < l.size() / 2; ++p) {
            auto op = qubit_coupling_op(l, 2 * p) + qubit_coupling_op(l, 2 * p + 1);
            CHECK(apply_norm(op, enc) < 1e-14);
        }
        return enc;
    };
    // |-1> (logical 0) -> |-1,+1>
    auto enc = pair_encode(Ket::basis(q, 0), lat);
    Ket expected = kron(coupling_eigenstate(lat, -1), coupling_eigenstate(lat, 1));
    CHECK(std::abs(expected.amplitudes().dot(enc.amplitudes())) == doctest::Approx(1.0));
    check_annihilated(Ket::basis(q, 0), lat);
    check_annihilated(Ket(q, Vector::Constant(2, 1.0 / std::numbers::sqrt2)), lat);

    auto four = chain({0.0, 0.1, 1.0, 1.1});
    check_annihilated(ghz(2), four);
    Xoshiro256 rng(9);
    for (int rep = 0; rep < 10; ++rep) check_annihilated(random_ket(qubit_register(2), rng), four);

    CHECK_THROWS_AS(pair_encode(Ket::basis(q, 0), chain({0.0, 1.0, 2.0})), InvalidArgument);
}

TEST_CASE("pair rate: constant intra-pair correlation gives zero") {
    auto lat = chain({0.0, 0.1, 2.0, 2.1});
    CorrelationFn flat = [](double) { return 0.004; };
    Xoshiro256 rng(10);
    for (int rep = 0; rep < 5; ++rep) {
        auto enc = pair_encode(random_ket(qubit_register(2), rng), lat).projector();
        auto r = pair_rate(lat, flat, enc);
        CHECK(std::abs(r.collective_rate) < 1e-12);
        CHECK(std::abs(r.physical_rate) < 1e-12);
        CHECK(r.intra_pair_variation == 0.0);
    }
}

TEST_CASE("pair rate: unencoded product states") {
    auto lat = chain({0.0, 0.1});
    CorrelationFn flat = [](double) { return 0.004; };
    // Both qubits in the +1 eigenstate of A: an eigenstate of the pair
    // coupling, so even unencoded it does not decohere.
    auto pp = kron(coupling_eigenstate(lat, 1), coupling_eigenstate(lat, 1)).projector();
    CHECK(std::abs(pair_rate(lat, flat, pp).collective_rate) < 1e-15);
    // |+1> (x) |0> is not: strictly positive.
    auto p0 = kron(coupling_eigenstate(lat, 1), Ket::basis(HilbertSpace{2}, 0)).projector();
    CHECK(pair_rate(lat, flat, p0).collective_rate > 1e-4);
}

TEST_CASE("pair rate grows as the square of the pair spacing") {
    GaussianSpectrum spec{1.0, 0.5, 1.0};
    auto fn = gaussian_correlation_fn(spec);
    HilbertSpace q{2};
    auto logical = Ket(q, Vector::Constant(2, 1.0 / std::numbers::sqrt2));
    std::vector<double> rates;
    for (double d : {0.01, 0.02, 0.04}) {
        auto lat = chain({0.0, d});
        auto r = pair_rate(lat, fn, pair_encode(logical, lat).projector());
        CHECK(std::abs(r.collective_rate) < 1e-15);
        rates.push_back(r.physical_rate);
    }
    CHECK(rates[1] / rates[0] == doctest::Approx(4.0).epsilon(0.1));
    CHECK(rates[2] / rates[0] == doctest::Approx(16.0).epsilon(0.1));
}
