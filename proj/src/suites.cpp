#include "decolab/suites.hpp"

#include "decolab/error.hpp"
#include "decolab/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <numbers>

namespace decolab {

namespace {

// Truncation per (L, K), fixed across temperature so one decomposition of H_T
// serves the three temperatures. Single-mode models get the converged
// truncation of the hottest grid point; the others are dimension-limited and
// compared against closed forms on the same truncated model.
std::size_t grid_n_max(std::size_t l, std::size_t k) {
    if (k == 1) return 46;
    if (k == 2) return l == 1 ? 15 : 10;
    return l == 1 ? 3 : 2;
}

BathModeSet grid_modes(std::size_t k, double temperature) {
    BathModeSet m;
    m.temperature = temperature;
    if (k == 1)
        m.modes = {{0.0, 1.0, 0.05}};
    else if (k == 2)
        m.modes = {{1.0, 1.0, 0.05}, {-1.0, 1.0, 0.05}};
    else
        m.modes = {{0.5, 0.8, 0.05}, {-0.5, 0.8, 0.05}, {1.5, 1.3, 0.04}, {-1.5, 1.3, 0.04}};
    return m;
}

QubitLattice grid_lattice(std::size_t l) {
    QubitLattice lat;
    for (std::size_t i = 0; i < l; ++i) lat.positions.push_back(static_cast<double>(i));
    lat.lambda1 = 0.8;
    lat.lambda2 = 0.6;
    lat.h0_splittings.assign(l, 1.0);
    return lat;
}

std::string fmt_t(double t) {
    if (t == 0.0) return "0";
    if (t == 0.5) return "0.5";
    return std::to_string(static_cast<int>(t));
}

Scenario make_scenario(std::string name, const QubitLattice& lat, const BathModeSet& modes, std::size_t n_max,
                       VerifyPath path, const SystemState& st) {
    Scenario s;
    s.name = std::move(name);
    s.lattice = lat;
    s.modes = modes;
    s.n_max = n_max;
    s.path = path;
    s.rho_s = st.rho;
    s.psi = st.psi;
    s.ensemble = st.ensemble;
    return s;
}

void add_state_scenarios(std::vector<Scenario>& out, const std::string& prefix, const QubitLattice& lat,
                         const BathModeSet& modes, std::size_t n_max, const std::string& preset) {
    const SystemState st = state_preset(preset, lat);
    if (preset == "maximally_mixed") {
        out.push_back(make_scenario(prefix + "/" + preset + "/entanglement", lat, modes, n_max,
                                    VerifyPath::entanglement, st));
        out.push_back(make_scenario(prefix + "/" + preset + "/average", lat, modes, n_max, VerifyPath::average, st));
    } else {
        out.push_back(make_scenario(prefix + "/" + preset + "/io", lat, modes, n_max, VerifyPath::io, st));
    }
}

} // namespace

HilbertSpace qubit_register(std::size_t n) { return HilbertSpace(std::vector<std::size_t>(n, 2)); }

SystemState state_preset(const std::string& name, const QubitLattice& lattice) {
    const std::size_t l = lattice.size();
    const HilbertSpace q = qubit_register(l);
    const auto d = static_cast<Eigen::Index>(q.total());
    SystemState st;
    if (name == "ground") {
        st.psi = Ket::basis(q, 0);
    } else if (name == "plus_all") {
        st.psi = Ket::normalized(q, Vector::Ones(d));
    } else if (name == "ghz") {
        Vector v = Vector::Zero(d);
        v(0) = v(d - 1) = 1.0;
        st.psi = Ket::normalized(q, v);
    } else if (name == "maximally_mixed") {
        std::vector<EnsembleMember> members;
        for (Eigen::Index i = 0; i < d; ++i)
            members.push_back({1.0 / static_cast<double>(d), Ket::basis(q, static_cast<std::size_t>(i))});
        st.ensemble = Ensemble(std::move(members));
        st.rho = DenseOperator(q, Matrix::Identity(d, d) / static_cast<double>(d));
        return st;
    } else if (name == "encoded") {
        if (l % 2 != 0) throw InvalidArgument("state: \"encoded\" needs an even number of qubits");
        const HilbertSpace lq = qubit_register(l / 2);
        const Ket logical = Ket::normalized(lq, Vector::Ones(static_cast<Eigen::Index>(lq.total())));
        st.psi = pair_encode(logical, lattice);
    } else {
        throw InvalidArgument("state: unknown preset \"" + name + "\"");
    }
    st.rho = st.psi->projector();
    return st;
}

std::vector<Scenario> grid_scenarios() {
    std::vector<Scenario> out;
    for (std::size_t l : {1u, 2u})
        for (std::size_t k : {1u, 2u, 4u})
            for (double t : {0.0, 0.5, 2.0}) {
                const auto lat = grid_lattice(l);
                const auto modes = grid_modes(k, t);
                const std::string prefix = "L" + std::to_string(l) + "K" + std::to_string(k) + "T" + fmt_t(t);
                std::vector<std::string> presets{"ground", "plus_all"};
                if (l > 1) presets.push_back("ghz");
                presets.push_back("maximally_mixed");
                if (l % 2 == 0) presets.push_back("encoded");
                for (const auto& p : presets) add_state_scenarios(out, prefix, lat, modes, grid_n_max(l, k), p);
            }
    return out;
}

std::vector<Scenario> factorized_scenarios() {
    std::vector<Scenario> out;
    const auto lat = grid_lattice(2);
    const struct {
        std::size_t k;
        double t;
    } cases[] = {{2, 0.5}, {4, 0.0}, {1, 2.0}};
    for (const auto& c : cases) {
        const auto modes = grid_modes(c.k, c.t);
        std::size_t n_max = 1;
        for (const auto& m : modes.modes) n_max = std::max(n_max, choose_n_max(m.omega, c.t));
        const std::string prefix = "L2K" + std::to_string(c.k) + "T" + fmt_t(c.t);
        for (const char* p : {"ghz", "maximally_mixed"})
            out.push_back(make_scenario(prefix + "/" + p + "/factorized", lat, modes, n_max, VerifyPath::factorized,
                                        state_preset(p, lat)));
    }
    return out;
}

std::vector<Scenario> quick_scenarios() {
    std::vector<Scenario> out;
    auto pick = [&](std::size_t l, std::size_t k, double t, const std::string& preset, VerifyPath path) {
        const auto lat = grid_lattice(l);
        const std::string name = "L" + std::to_string(l) + "K" + std::to_string(k) + "T" + fmt_t(t) + "/" + preset +
                                 "/" + to_string(path);
        out.push_back(make_scenario(name, lat, grid_modes(k, t), grid_n_max(l, k), path, state_preset(preset, lat)));
    };
    pick(1, 1, 0.0, "ground", VerifyPath::io);
    pick(1, 2, 0.5, "maximally_mixed", VerifyPath::entanglement);
    pick(1, 4, 2.0, "plus_all", VerifyPath::io);
    pick(2, 1, 0.0, "encoded", VerifyPath::io);
    pick(2, 2, 2.0, "maximally_mixed", VerifyPath::average);
    pick(2, 4, 0.5, "ghz", VerifyPath::io);
    // Coupling switched off: both coefficients vanish.
    {
        const auto lat = grid_lattice(1);
        BathModeSet modes = grid_modes(1, 0.5);
        modes.modes[0].g = 0.0;
        out.push_back(make_scenario("L1K1T0.5/no_coupling/io", lat, modes, 20, VerifyPath::io,
                                    state_preset("plus_all", lat)));
    }
    out.push_back(factorized_scenarios().front());
    return out;
}

std::vector<Scenario> full_scenarios() {
    std::vector<Scenario> out = grid_scenarios();
    for (auto& s : factorized_scenarios()) out.push_back(std::move(s));
    const auto lat1 = grid_lattice(1);
    BathModeSet off = grid_modes(1, 0.5);
    off.modes[0].g = 0.0;
    out.push_back(make_scenario("L1K1T0.5/no_coupling/io", lat1, off, 20, VerifyPath::io,
                                state_preset("plus_all", lat1)));
    // Same model as L1K1T0 without the free splitting.
    QubitLattice bare = lat1;
    bare.h0_splittings.clear();
    out.push_back(make_scenario("L1K1T0/no_splitting/ground/io", bare, grid_modes(1, 0.0), grid_n_max(1, 1),
                                VerifyPath::io, state_preset("ground", bare)));
    return out;
}

std::vector<VerificationReport> run_scenarios(const std::vector<Scenario>& scenarios, unsigned jobs) {
    std::map<std::string, std::size_t> index;
    std::vector<const Scenario*> unique;
    std::vector<std::size_t> which(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const auto [it, fresh] = index.emplace(dynamics_key(scenarios[i]), unique.size());
        if (fresh) unique.push_back(&scenarios[i]);
        which[i] = it->second;
    }
    std::vector<std::shared_ptr<const Dynamics>> dyn(unique.size());
    parallel_for(unique.size(), jobs, [&](std::size_t u) {
        const Scenario& s = *unique[u];
        dyn[u] = make_dynamics(build_hamiltonian(s.lattice, s.modes, s.n_max));
    });
    std::vector<VerificationReport> out(scenarios.size());
    parallel_for(scenarios.size(), jobs, [&](std::size_t i) {
        try {
            out[i] = verify_expansion(scenarios[i], dyn[which[i]]);
        } catch (const std::exception& e) {
            out[i].scenario = scenarios[i].name;
            out[i].path = scenarios[i].path;
            out[i].pass = false;
            out[i].message = e.what();
        }
    });
    return out;
}

SuiteRow to_row(const VerificationReport& r) {
    return {r.scenario, r.c2_analytic, r.c2_fitted, r.rel_err, r.pass, r.message};
}

InequalityInstance inequality_instance(std::size_t index, std::uint64_t seed) {
    if (index == 0) {
        const HilbertSpace q{2};
        const double g = 0.05;
        const auto bos = boson_ops(4);
        const DenseOperator b = Complex(g) * (bos.a + bos.a_dagger);
        const Ket plus = Ket::normalized(q, Vector::Ones(2));
        Vector m(2);
        m << 1.0, -1.0;
        const Ket minus = Ket::normalized(q, m);
        return {DenseOperator(q, Matrix::Identity(2, 2) / 2.0), Ensemble({{0.5, plus}, {0.5, minus}}),
                kron(pauli('x'), b), thermal_boson_state(1.0, 0.0, 4)};
    }
    // Independent stream per instance so instances do not depend on each other.
    Xoshiro256 rng(seed * 0x100000001b3ULL + index);
    const std::size_t ds = rng.uniform() < 0.5 ? 2 : 4;
    const HilbertSpace q{ds};
    const std::size_t n_max = 3;
    const double omega = rng.uniform(0.5, 2.0);
    const double temp = rng.uniform() < 0.25 ? 0.0 : rng.uniform(0.05, 2.0);
    const DenseOperator rho_env = thermal_boson_state(omega, temp, n_max);
    const HilbertSpace joint = concat(q, rho_env.space());
    const DenseOperator h_i = Complex(rng.uniform(0.01, 0.1)) * random_hermitian(joint, rng);

    // Random density of random rank, then a random decomposition of it.
    const std::size_t rank = 1 + rng.index(ds);
    const Matrix g = [&] {
        Matrix w(static_cast<Eigen::Index>(ds), static_cast<Eigen::Index>(rank));
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.complex_normal();
        return w;
    }();
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = (0.5 * (rho + rho.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const std::size_t members = rank + rng.index(4);
    // psi_i ~ sum_c U_ic sqrt(p_c) v_c over the `rank` nonzero eigenpairs.
    const Matrix u = random_unitary(members, rng);
    std::vector<EnsembleMember> ens;
    for (std::size_t i = 0; i < members; ++i) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(ds));
        for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(rank); ++c) {
            const Eigen::Index j = static_cast<Eigen::Index>(ds) - 1 - c;
            const double p = std::max(0.0, es.eigenvalues()(j));
            v += u(static_cast<Eigen::Index>(i), c) * std::sqrt(p) * es.eigenvectors().col(j);
        }
        const double w = v.squaredNorm();
        if (w > 1e-300) ens.push_back({w, Ket::normalized(q, v)});
    }
    double total = 0.0;
    for (const auto& m : ens) total += m.p;
    for (auto& m : ens) m.p /= total;
    return {DenseOperator(q, rho), Ensemble(std::move(ens)), h_i, rho_env};
}

std::vector<SuiteRow> inequality_suite(std::size_t count, std::uint64_t seed, unsigned jobs) {
    std::vector<SuiteRow> rows(count);
    parallel_for(count, jobs, [&](std::size_t i) {
        SuiteRow& r = rows[i];
        r.scenario = "inequality/" + std::to_string(i);
        try {
            const auto inst = inequality_instance(i, seed);
            const auto rep = check_rate_inequality(inst.rho_s, inst.ensemble, inst.h_i, inst.rho_env);
            r.c2_analytic = rep.c2_e;
            r.c2_fitted = rep.c2_a;
            r.rel_err = rep.c2_e > 0.0 ? (rep.c2_e - rep.c2_a) / rep.c2_e : 0.0;
            r.pass = rep.holds;
        } catch (const std::exception& e) {
            r.message = e.what();
        }
    });
    return rows;
}

std::vector<SuiteRow> encoding_suite() {
    std::vector<SuiteRow> rows;
    for (double temp : {0.0, 0.5}) {
        BathModeSet modes;
        modes.modes = {{0.0, 1.0, 0.05}}; // Omega^2 constant in space
        modes.temperature = temp;
        const double x = correlation_fn_discrete(modes, 0.0);
        for (std::size_t logical_qubits : {1u, 2u}) {
            QubitLattice lat;
            lat.lambda1 = 0.8;
            lat.lambda2 = 0.6;
            for (std::size_t p = 0; p < logical_qubits; ++p) {
                lat.positions.push_back(5.0 * static_cast<double>(p));
                lat.positions.push_back(5.0 * static_cast<double>(p) + 1.0);
            }
            QubitLattice bare;
            bare.lambda1 = lat.lambda1;
            bare.lambda2 = lat.lambda2;
            for (std::size_t p = 0; p < logical_qubits; ++p) bare.positions.push_back(5.0 * static_cast<double>(p) + 0.5);

            const HilbertSpace lq = qubit_register(logical_qubits);
            const auto d = static_cast<Eigen::Index>(lq.total());
            std::vector<std::pair<std::string, Ket>> states;
            states.emplace_back("plus", Ket::normalized(lq, Vector::Ones(d)));
            if (logical_qubits > 1) {
                Vector v = Vector::Zero(d);
                v(0) = v(d - 1) = 1.0;
                states.emplace_back("ghz", Ket::normalized(lq, v));
            }
            for (const auto& [label, logical] : states) {
                const std::string tag = "T" + fmt_t(temp) + "/logical" + std::to_string(logical_qubits) + "/" + label;
                const Ket enc = pair_encode(logical, lat);
                const double r_enc = decoherence_rate(lat, modes, enc.projector());
                rows.push_back({"encoding/" + tag + "/encoded", 0.0, r_enc, std::abs(r_enc), std::abs(r_enc) < 1e-12, ""});

                const Ket raw = logical_in_coupling_basis(logical, bare);
                const double r_raw = decoherence_rate(bare, modes, raw.projector());
                const double bound = x * (lat.lambda1 * lat.lambda1 + lat.lambda2 * lat.lambda2);
                rows.push_back({"encoding/" + tag + "/unencoded", bound, r_raw, (r_raw - bound) / bound,
                                r_raw >= bound * (1.0 - 1e-12) && r_raw > 0.0, ""});
            }
        }
    }
    return rows;
}

std::vector<SuiteRow> run_suite(const std::string& name, std::uint64_t seed, unsigned jobs) {
    std::vector<SuiteRow> rows;
    if (name == "quick" || name == "full") {
        for (const auto& r : run_scenarios(name == "quick" ? quick_scenarios() : full_scenarios(), jobs))
            rows.push_back(to_row(r));
    } else if (name == "inequality") {
        rows = inequality_suite(1000, seed, jobs);
    } else if (name == "encoding") {
        rows = encoding_suite();
    } else {
        throw ConfigError("verify.suite", "unknown suite \"" + name + "\" (quick, full, inequality, encoding)");
    }
    return rows;
}

} // namespace decolab
