// One pass/fail line per acceptance criterion; nonzero exit if any fails.

#include "decolab/cli.hpp"
#include "decolab/oracle.hpp"
#include "decolab/random.hpp"
#include "decolab/spectral.hpp"
#include "decolab/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace decolab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<double> u_grid() {
    std::vector<double> u;
    for (int i = 0; i <= 100; ++i) u.push_back(0.1 * i);
    return u;
}

// Shared by criteria 1 and 2.
std::vector<VerificationReport>& grid_reports() {
    static std::vector<VerificationReport> reps = run_scenarios(grid_scenarios(), 1);
    return reps;
}

Outcome first_order() {
    Outcome o;
    std::size_t checked = 0;
    double worst = 0.0;
    for (const auto& r : grid_reports()) {
        const auto& f = r.fit;
        if (!r.message.empty() && !f.converged) {
            o.pass = false;
            o.detail += " " + r.scenario + ": " + r.message;
            continue;
        }
        // Rates at the zero floor carry no sign information.
        if (!(f.c2_hat > r.abs_floor)) continue;
        ++checked;
        const double ratio = std::abs(f.c1_hat) * f.t_max / (f.c2_hat * f.t_max * f.t_max);
        worst = std::max(worst, ratio);
        if (!(ratio < 1e-4)) {
            o.pass = false;
            o.detail += " " + r.scenario;
        }
    }
    // H_I = 0: the curve must not move at all.
    QubitLattice q;
    q.positions = {0.0, 1.0};
    q.h0_splittings = {1.0, 0.7};
    BathModeSet m;
    m.modes = {{1.0, 1.0, 0.0}, {-1.0, 1.0, 0.0}};
    m.temperature = 0.5;
    auto model = build_hamiltonian(q, m, 3);
    FidelityOracle oracle(model, thermal_env_state(m, 3));
    double flat = 0.0;
    auto times = uniform_times(50.0, 51);
    for (const char* preset : {"ground", "plus_all", "ghz", "maximally_mixed"}) {
        auto st = state_preset(preset, q);
        auto c = oracle.entanglement(st.rho, times);
        for (double v : c.infidelity) flat = std::max(flat, std::abs(v));
    }
    if (!(flat < 1e-14)) o.pass = false;
    o.detail = std::to_string(checked) + " fits with positive rate, max |c1| t / (c2 t^2) = " + num(worst) +
               "; uncoupled curve max |1 - F| = " + num(flat) + o.detail;
    return o;
}

Outcome second_order() {
    Outcome o;
    std::size_t passed = 0;
    double worst = 0.0;
    for (const auto& r : grid_reports()) {
        if (r.pass) ++passed;
        else o.detail += " failed: " + r.scenario;
        if (r.c2_analytic > r.abs_floor) worst = std::max(worst, r.rel_err);
    }
    o.pass = passed == grid_reports().size();
    const auto t0 = std::chrono::steady_clock::now();
    auto quick = run_suite("quick", 0, 1);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t qp = 0;
    for (const auto& r : quick) qp += r.pass;
    o.pass = o.pass && qp == quick.size() && quick.size() <= 8 && secs < 60.0;
    o.detail = std::to_string(passed) + "/" + std::to_string(grid_reports().size()) +
               " grid scenarios within 1%, max rel err " + num(worst) + "; quick suite " + std::to_string(qp) + "/" +
               std::to_string(quick.size()) + " in " + num(secs) + " s" + o.detail;
    return o;
}

Outcome factorization() {
    struct Case {
        std::string name;
        std::size_t L;
        BathModeSet modes;
    };
    auto mk = [](std::vector<BathMode> ms, double T) {
        BathModeSet b;
        b.modes = std::move(ms);
        b.temperature = T;
        return b;
    };
    std::vector<Case> cases = {
        {"L1 K2 T0.5", 1, mk({{1.0, 1.0, 0.05}, {-1.0, 1.0, 0.05}}, 0.5)},
        {"L2 K2 T0.5", 2, mk({{1.0, 1.0, 0.05}, {-1.0, 1.0, 0.05}}, 0.5)},
        {"L2 K1 T2", 2, mk({{0.0, 1.0, 0.05}}, 2.0)},
        {"L2 K4 T0.1", 2, mk({{0.5, 0.8, 0.05}, {-0.5, 0.8, 0.05}, {1.5, 1.3, 0.04}, {-1.5, 1.3, 0.04}}, 0.1)},
        {"L3 K2 T0.3", 3, mk({{0.6, 1.0, 0.05}, {-0.6, 1.0, 0.05}}, 0.3)},
    };
    Outcome o;
    double worst = 0.0, tail = 0.0;
    Xoshiro256 rng(2024);
    for (const auto& c : cases) {
        std::size_t n_max = 1;
        for (const auto& m : c.modes.modes) n_max = std::max(n_max, choose_n_max(m.omega, c.modes.temperature));
        for (const auto& m : c.modes.modes) tail = std::max(tail, thermal_tail_weight(m.omega, c.modes.temperature, n_max));
        QubitLattice q;
        for (std::size_t l = 0; l < c.L; ++l) q.positions.push_back(0.9 * double(l));
        q.lambda1 = 0.8;
        q.lambda2 = 0.6;
        auto model = build_hamiltonian(q, c.modes, n_max);
        auto env = thermal_env_state(c.modes, n_max);
        std::vector<DenseOperator> states;
        for (const char* p : {"ground", "plus_all", "maximally_mixed"}) states.push_back(state_preset(p, q).rho);
        if (c.L > 1) states.push_back(state_preset("ghz", q).rho);
        for (int i = 0; i < 3; ++i) states.push_back(random_density(qubit_register(c.L), rng));
        for (const auto& rho : states) {
            const double fact = decoherence_rate(q, c.modes, rho);
            const double direct = entanglement_c2(rho, model.h_i, env).c2;
            const double err = std::abs(fact - direct) / std::abs(direct);
            worst = std::max(worst, err);
            if (!(err <= 1e-6)) {
                o.pass = false;
                o.detail += " " + c.name;
            }
        }
    }
    o.pass = o.pass && tail < 1e-10;
    o.detail = std::to_string(cases.size()) + " thermal models, max rel diff " + num(worst) + ", max tail weight " +
               num(tail) + o.detail;
    return o;
}

Outcome inequality() {
    auto rows = inequality_suite(1000, 0, 1);
    Outcome o;
    std::size_t held = 0, strict = 0;
    for (const auto& r : rows) {
        const bool ok = r.c2_analytic >= r.c2_fitted - 1e-10;
        held += ok;
        if (!ok || !r.pass) o.pass = false;
        if (r.c2_analytic > 0.0 && r.c2_analytic >= 10.0 * r.c2_fitted) ++strict;
    }
    o.pass = o.pass && strict >= 1;
    o.detail = std::to_string(held) + "/1000 hold, " + std::to_string(strict) + " strict by 10x (instance 0: " +
               num(rows[0].c2_analytic) + " vs " + num(rows[0].c2_fitted) + ")";
    return o;
}

Outcome encoding() {
    Outcome o;
    double worst_enc = 0.0, min_margin = 1e300;
    auto rows = encoding_suite();
    for (const auto& r : rows) {
        if (!r.pass) {
            o.pass = false;
            o.detail += " " + r.scenario;
        }
        if (r.scenario.ends_with("/encoded")) worst_enc = std::max(worst_enc, std::abs(r.c2_fitted));
        else min_margin = std::min(min_margin, r.c2_fitted / r.c2_analytic);
    }
    // Slightly varying Omega^2: spacing d at fixed kbar.
    GaussianSpectrum spec{1.0, 0.5, 0.005};
    auto fn = gaussian_correlation_fn(spec);
    std::vector<double> rates;
    for (double kd : {0.01, 0.02, 0.04}) {
        QubitLattice q;
        q.positions = {0.0, kd / spec.k_bar};
        q.lambda1 = 0.8;
        q.lambda2 = 0.6;
        auto logical = Ket::normalized(qubit_register(1), Vector::Ones(2));
        rates.push_back(pair_rate(q, fn, pair_encode(logical, q).projector()).physical_rate);
    }
    const double r2 = rates[1] / rates[0], r4 = rates[2] / rates[0];
    if (!(std::abs(r2 / 4.0 - 1.0) <= 0.1 && std::abs(r4 / 16.0 - 1.0) <= 0.1)) o.pass = false;
    o.detail = "max encoded rate " + num(worst_enc) + ", min unencoded rate / bound " + num(min_margin) +
               ", spacing ratios 1:" + num(r2) + ":" + num(r4) + o.detail;
    return o;
}

Outcome additivity() {
    Outcome o;
    Xoshiro256 rng(77);
    const double x = 0.005;
    CorrelationFn delta = [x](double d) { return d == 0.0 ? x : 0.0; };
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t L = 2 + rng.index(3);
        QubitLattice q;
        for (std::size_t l = 0; l < L; ++l) q.positions.push_back(double(l) + rng.uniform(0.0, 0.5));
        q.lambda1 = rng.uniform(-1.0, 1.0);
        q.lambda2 = rng.uniform(-1.0, 1.0);
        auto rho = random_density(qubit_register(L), rng);
        double sum = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            QubitLattice single = q;
            single.positions = {q.positions[l]};
            sum += decoherence_rate(single, delta, partial_trace(rho, {l}));
        }
        worst = std::max(worst, std::abs(decoherence_rate(q, delta, rho) - sum));
    }
    o.pass = worst <= 1e-12;
    o.detail = "50 random registers, max |rate - sum of single-qubit rates| = " + num(worst);
    return o;
}

Outcome ohmic() {
    Outcome o;
    OhmicBath cold{1.0, 1.0, 0.0, 1.0};
    double low = 0.0, at_zero = 0.0;
    for (double u : u_grid()) {
        const double q = ohmic_correlation_quad(cold, u), c = ohmic_correlation_lowT(cold, u);
        if (std::abs(u - 1.0) < 1e-12) at_zero = std::abs(q) / ohmic_correlation_lowT(cold, 0.0);
        else low = std::max(low, std::abs(q - c) / std::abs(c));
    }
    auto high_err = [](double T) {
        OhmicBath b{1.0, 1.0, T, 1.0};
        double e = 0.0;
        for (double u : u_grid())
            e = std::max(e, std::abs(ohmic_correlation_quad(b, u) - ohmic_correlation_highT(b, u)) /
                                ohmic_correlation_highT(b, u));
        return e;
    };
    const double h2 = high_err(1e2), h4 = high_err(1e4);
    double lo = 0.5, hi = 1.5;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (ohmic_correlation_quad(cold, mid) > 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    o.pass = low <= 1e-6 && at_zero <= 1e-6 && h2 <= 1e-2 && h4 <= 1e-4 && std::abs(root - 1.0) <= 1e-6;
    o.detail = "low-T max rel err " + num(low) + " (|value| at u=1: " + num(at_zero) + "), high-T err " + num(h2) +
               " at 1e2 and " + num(h4) + " at 1e4, zero crossing at u = 1 + " + num(root - 1.0);
    return o;
}

Outcome regime() {
    Outcome o;
    for (double d : {0.01, 1.0, 100.0}) {
        std::string first, labels;
        bool constant = true;
        for (int i = 0; i <= 40; ++i) {
            OhmicBath b{1.0, 1.0, std::pow(10.0, -2.0 + 0.1 * i), 1.0};
            const std::string r = to_string(classify_regime(d, ohmic_spectrum_moments(b)).regime);
            if (i == 0) first = r;
            constant = constant && r == first;
        }
        o.pass = o.pass && constant;
        o.detail += (o.detail.empty() ? "" : ", ") + std::string("d = ") + num(d) + ": " + first +
                    (constant ? "" : " (changes with T)");
    }
    o.detail += " over 41 temperatures";
    return o;
}

Outcome purification() {
    Outcome o;
    QubitLattice q;
    q.positions = {0.0, 1.0};
    q.lambda1 = 0.8;
    q.lambda2 = 0.6;
    q.h0_splittings = {1.0, 1.0};
    BathModeSet m;
    m.modes = {{1.0, 1.0, 0.05}, {-1.0, 1.0, 0.05}};
    m.temperature = 0.5;
    const std::size_t n = 4;
    FidelityOracle oracle(build_hamiltonian(q, m, n), thermal_env_state(m, n));
    Xoshiro256 rng(9);
    auto rho = random_density(qubit_register(2), rng);
    std::vector<double> times{0.0, 0.01, 0.1, 0.5, 2.0, 8.0, 30.0};
    auto ref = oracle.entanglement(rho, times);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        Matrix u = random_unitary(4, rng);
        auto c = oracle.entanglement(rho, times, &u);
        for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, std::abs(c.values[i] - ref.values[i]));
    }
    o.pass = worst <= 1e-10;
    o.detail = "20 ancilla unitaries, max pointwise difference " + num(worst);
    return o;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the executable; returns stdout, or "" on a nonzero exit.
std::string run(const std::string& args, const std::string& config, const std::filesystem::path& dir, int tag) {
    const auto cfg = dir / ("config" + std::to_string(tag) + ".json");
    const auto out = dir / ("out" + std::to_string(tag) + ".txt");
    std::ofstream(cfg) << config;
    const std::string cmd = std::string(DECOLAB_BIN) + " " + args + " --config " + cfg.string() + " --out " +
                            out.string() + " 2>/dev/null";
    const int st = std::system(cmd.c_str());
    if (!WIFEXITED(st) || WEXITSTATUS(st) != 0) return "";
    return read_file(out);
}

Outcome determinism() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "decolab_acceptance";
    std::filesystem::create_directories(dir);
    struct Job {
        std::string name, args, config;
    };
    std::vector<Job> jobs = {
        {"verify inequality", "verify --seed 7", R"({"verify": {"suite": "inequality"}})"},
        {"verify quick", "verify", R"({"verify": {"suite": "quick"}})"},
        {"sweep spacing", "sweep",
         R"({"bath": {"ohmic": {"omega_c": 1.0, "v": 1.0, "temperature": 0.5}}, "correlation": {"method": "quad"},
             "sweep": {"parameter": "spacing", "start": 0.01, "stop": 100.0, "count": 25, "scale": "log",
                       "command": "correlation"}})"},
        {"sweep temperature", "sweep --format json",
         R"({"bath": {"ohmic": {"omega_c": 1.0, "v": 1.0, "temperature": 1.0}}, "regime": {"d": [0.01, 1.0, 100.0]},
             "sweep": {"parameter": "temperature", "start": 0.01, "stop": 100.0, "count": 9, "scale": "log",
                       "command": "regime"}})"},
    };
    int tag = 0;
    for (const auto& j : jobs) {
        const std::string a = run(j.args + " --jobs 1", j.config, dir, tag++);
        const std::string b = run(j.args + " --jobs 2", j.config, dir, tag++);
        const bool same = !a.empty() && a == b;
        o.pass = o.pass && same;
        o.detail += (o.detail.empty() ? "" : ", ") + j.name + (same ? " identical" : " DIFFERS") + " (" +
                    std::to_string(a.size()) + " bytes)";
    }
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"first-order coefficient vanishes", first_order},
        {"second-order closed form", second_order},
        {"factorization identity", factorization},
        {"rate inequality", inequality},
        {"pair encoding", encoding},
        {"independent-decoherence additivity", additivity},
        {"ohmic closed forms", ohmic},
        {"regime insensitive to temperature", regime},
        {"purification independence", purification},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
