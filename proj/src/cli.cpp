#include "decolab/cli.hpp"

#include "decolab/fidelity_expansion.hpp"
#include "decolab/oracle.hpp"
#include "decolab/parallel.hpp"
#include "decolab/suites.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace decolab {

// ---------------------------------------------------------------------------
// Tables

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
    struct {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& v) const { return v; }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    } visit;
    return std::visit(visit, c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

} // namespace

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(cell_text(row[i]));
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& t) {
    nlohmann::ordered_json doc;
    doc["columns"] = t.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            const Cell& c = row[i];
            auto& slot = r[t.columns[i]];
            if (std::holds_alternative<std::monostate>(c))
                slot = nullptr;
            else if (const double* d = std::get_if<double>(&c))
                slot = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(format_double(*d));
            else if (const auto* n = std::get_if<std::int64_t>(&c))
                slot = *n;
            else if (const auto* s = std::get_if<std::string>(&c))
                slot = *s;
            else
                slot = std::get<bool>(c);
        }
        doc["rows"].push_back(std::move(r));
    }
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Configuration parsing

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json* find(const Json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(join(path, it.key()), "unknown field");
    }
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

double number_or(const Json& obj, const char* key, const std::string& path, double fallback) {
    const Json* j = find(obj, key);
    return j ? number(*j, join(path, key)) : fallback;
}

double required_number(const Json& obj, const char* key, const std::string& path) {
    const Json* j = find(obj, key);
    if (!j) throw ConfigError(join(path, key), "required");
    return number(*j, join(path, key));
}

std::uint64_t non_negative_integer(const Json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        if (j.get<std::int64_t>() < 0) throw ConfigError(path, "must be non-negative");
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    throw ConfigError(path, "expected a non-negative integer");
}

std::vector<double> number_list(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at(path, i)));
    return out;
}

Complex amplitude(const Json& j, const std::string& path) {
    if (j.is_number()) return {number(j, path), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
    throw ConfigError(path, "expected a number or a [re, im] pair");
}

Vector amplitude_list(const Json& j, const std::string& path, std::size_t qubits) {
    if (!j.is_array()) throw ConfigError(path, "expected a list of amplitudes");
    const std::size_t want = std::size_t{1} << qubits;
    if (qubits > 0 && j.size() != want)
        throw ConfigError(path, "expected " + std::to_string(want) + " amplitudes for " + std::to_string(qubits) +
                                    " qubits, got " + std::to_string(j.size()));
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = amplitude(j[i], at(path, i));
    if (!(v.norm() > 0.0)) throw ConfigError(path, "amplitudes must not all vanish");
    return v / v.norm();
}

BathConfig parse_bath(const Json& j) {
    require_object(j, "bath");
    if (j.size() != 1) throw ConfigError("bath", "exactly one of discrete, ohmic, gaussian is required");
    BathConfig b;
    if (const Json* d = find(j, "discrete")) {
        const std::string p = "bath.discrete";
        require_object(*d, p);
        check_keys(*d, p, {"modes", "temperature"});
        b.kind = BathKind::discrete;
        b.discrete.temperature = number_or(*d, "temperature", p, 0.0);
        if (b.discrete.temperature < 0.0) throw ConfigError(join(p, "temperature"), "must be non-negative");
        const Json* modes = find(*d, "modes");
        if (!modes || !modes->is_array() || modes->empty())
            throw ConfigError(join(p, "modes"), "a non-empty list of {k, omega, g} is required");
        for (std::size_t i = 0; i < modes->size(); ++i) {
            const std::string mp = at(join(p, "modes"), i);
            const Json& m = (*modes)[i];
            require_object(m, mp);
            check_keys(m, mp, {"k", "omega", "g"});
            BathMode mode{number_or(m, "k", mp, 0.0), required_number(m, "omega", mp), required_number(m, "g", mp)};
            if (!(mode.omega > 0.0)) throw ConfigError(join(mp, "omega"), "must be positive");
            b.discrete.modes.push_back(mode);
        }
        if (!b.discrete.is_symmetric())
            throw ConfigError(join(p, "modes"), "every mode (k, omega, g) with k != 0 needs a (-k, omega, g) partner");
    } else if (const Json* o = find(j, "ohmic")) {
        const std::string p = "bath.ohmic";
        require_object(*o, p);
        check_keys(*o, p, {"omega_c", "v", "temperature", "amplitude"});
        b.kind = BathKind::ohmic;
        b.ohmic.omega_c = required_number(*o, "omega_c", p);
        b.ohmic.v = number_or(*o, "v", p, 1.0);
        b.ohmic.temperature = number_or(*o, "temperature", p, 0.0);
        b.ohmic.amplitude = number_or(*o, "amplitude", p, 1.0);
        if (!(b.ohmic.omega_c > 0.0)) throw ConfigError(join(p, "omega_c"), "must be positive");
        if (!(b.ohmic.v > 0.0)) throw ConfigError(join(p, "v"), "must be positive");
        if (b.ohmic.temperature < 0.0) throw ConfigError(join(p, "temperature"), "must be non-negative");
        if (!(b.ohmic.amplitude > 0.0)) throw ConfigError(join(p, "amplitude"), "must be positive");
    } else if (const Json* g = find(j, "gaussian")) {
        const std::string p = "bath.gaussian";
        require_object(*g, p);
        check_keys(*g, p, {"k_bar", "delta_k", "x"});
        b.kind = BathKind::gaussian;
        b.gaussian.k_bar = required_number(*g, "k_bar", p);
        b.gaussian.delta_k = required_number(*g, "delta_k", p);
        b.gaussian.x = number_or(*g, "x", p, 1.0);
        if (b.gaussian.delta_k < 0.0) throw ConfigError(join(p, "delta_k"), "must be non-negative");
    } else {
        throw ConfigError("bath." + j.begin().key(), "unknown bath variant (discrete, ohmic, gaussian)");
    }
    return b;
}

} // namespace

ScenarioConfig parse_scenario(const Json& j) {
    require_object(j, "");
    check_keys(j, "", {"id", "description", "qubits", "lambda1", "lambda2", "h0_splittings", "bath", "state",
                       "fidelity_kind", "ensemble", "n_max", "seed", "correlation", "regime", "verify", "sweep"});
    ScenarioConfig c;
    if (const Json* id = find(j, "id")) {
        if (!id->is_string()) throw ConfigError("id", "expected a string");
        c.id = id->get<std::string>();
    }
    if (const Json* q = find(j, "qubits")) {
        if (!q->is_array() || q->empty()) throw ConfigError("qubits", "expected a non-empty list of {position}");
        if (q->size() > 20) throw ConfigError("qubits", "at most 20 qubits are supported");
        for (std::size_t i = 0; i < q->size(); ++i) {
            const std::string p = at("qubits", i);
            require_object((*q)[i], p);
            check_keys((*q)[i], p, {"position"});
            c.lattice.positions.push_back(required_number((*q)[i], "position", p));
            if (i > 0 && !(c.lattice.positions[i] > c.lattice.positions[i - 1]))
                throw ConfigError(join(p, "position"), "positions must be strictly increasing");
        }
    }
    c.lattice.lambda1 = number_or(j, "lambda1", "", 1.0);
    c.lattice.lambda2 = number_or(j, "lambda2", "", 0.0);
    if (const Json* h = find(j, "h0_splittings")) {
        c.lattice.h0_splittings = number_list(*h, "h0_splittings");
        if (c.lattice.h0_splittings.size() != c.lattice.size())
            throw ConfigError("h0_splittings", "expected one splitting per qubit (" +
                                                   std::to_string(c.lattice.size()) + ")");
    }
    if (const Json* b = find(j, "bath")) {
        c.bath = parse_bath(*b);
        c.has_bath = true;
    }
    if (const Json* s = find(j, "state")) {
        if (s->is_string()) {
            c.state_name = s->get<std::string>();
            static const char* presets[] = {"ground", "plus_all", "ghz", "maximally_mixed", "encoded"};
            bool known = false;
            for (const char* p : presets) known = known || c.state_name == p;
            if (!known) throw ConfigError("state", "unknown preset \"" + c.state_name + "\"");
            if (c.state_name == "encoded" && c.lattice.size() % 2 != 0)
                throw ConfigError("state", "\"encoded\" needs an even number of qubits");
        } else if (s->is_object()) {
            check_keys(*s, "state", {"amplitudes"});
            const Json* a = find(*s, "amplitudes");
            if (!a) throw ConfigError("state.amplitudes", "required");
            c.state_name = "amplitudes";
            c.amplitudes = amplitude_list(*a, "state.amplitudes", c.lattice.size());
        } else {
            throw ConfigError("state", "expected a preset name or {\"amplitudes\": [...]}");
        }
    }
    if (const Json* k = find(j, "fidelity_kind")) {
        std::vector<Json> items;
        if (k->is_string())
            items.push_back(*k);
        else if (k->is_array())
            items.assign(k->begin(), k->end());
        else
            throw ConfigError("fidelity_kind", "expected io, entanglement, average or a list of them");
        for (std::size_t i = 0; i < items.size(); ++i) {
            const std::string p = k->is_array() ? at("fidelity_kind", i) : "fidelity_kind";
            if (!items[i].is_string()) throw ConfigError(p, "expected a string");
            const auto v = items[i].get<std::string>();
            if (v != "io" && v != "entanglement" && v != "average")
                throw ConfigError(p, "unknown fidelity kind \"" + v + "\" (io, entanglement, average)");
            c.kinds.push_back(v);
        }
    }
    if (const Json* e = find(j, "ensemble")) {
        if (!e->is_array() || e->empty()) throw ConfigError("ensemble", "expected a non-empty list of {p, amplitudes}");
        const HilbertSpace q = qubit_register(c.lattice.size());
        std::vector<EnsembleMember> members;
        double total = 0.0;
        for (std::size_t i = 0; i < e->size(); ++i) {
            const std::string p = at("ensemble", i);
            require_object((*e)[i], p);
            check_keys((*e)[i], p, {"p", "amplitudes"});
            const double w = required_number((*e)[i], "p", p);
            if (w < 0.0) throw ConfigError(join(p, "p"), "must be non-negative");
            const Json* a = find((*e)[i], "amplitudes");
            if (!a) throw ConfigError(join(p, "amplitudes"), "required");
            if (c.lattice.size() == 0) throw ConfigError("qubits", "required when an ensemble is given");
            members.push_back({w, Ket(q, amplitude_list(*a, join(p, "amplitudes"), c.lattice.size()))});
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12) throw ConfigError("ensemble", "weights must sum to 1");
        c.ensemble = std::move(members);
    }
    if (const Json* n = find(j, "n_max")) {
        const auto v = non_negative_integer(*n, "n_max");
        if (v < 1) throw ConfigError("n_max", "must be at least 1");
        c.n_max = static_cast<std::size_t>(v);
    }
    if (const Json* s = find(j, "seed")) c.seed = non_negative_integer(*s, "seed");
    return c;
}

Json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open \"" + path + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
    }
}

std::size_t dimension_cap_from_env() {
    const char* v = std::getenv("DECOLAB_NMAX_CAP");
    if (!v || !*v) return 4096;
    std::size_t cap = 0;
    const std::string s(v);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || cap < 2)
        throw ConfigError("DECOLAB_NMAX_CAP", "expected an integer >= 2, got \"" + s + "\"");
    return cap;
}

// ---------------------------------------------------------------------------
// Shared command plumbing

namespace {

void require_qubits(const ScenarioConfig& c) {
    if (c.lattice.size() == 0) throw ConfigError("qubits", "required");
}
void require_bath(const ScenarioConfig& c) {
    if (!c.has_bath) throw ConfigError("bath", "required");
}

const Json& section(const Json& config, const char* name) {
    static const Json empty = Json::object();
    const Json* s = find(config, name);
    if (!s) return empty;
    require_object(*s, name);
    return *s;
}

SystemState config_state(const ScenarioConfig& c) {
    if (c.state_name.empty()) throw ConfigError("state", "required");
    SystemState st;
    if (c.amplitudes) {
        st.psi = Ket(qubit_register(c.lattice.size()), *c.amplitudes);
        st.rho = st.psi->projector();
    } else {
        st = state_preset(c.state_name, c.lattice);
    }
    if (c.ensemble) {
        const Ensemble e(*c.ensemble);
        if ((e.mixture().matrix() - st.rho.matrix()).cwiseAbs().maxCoeff() > 1e-10)
            throw ConfigError("ensemble", "does not mix to the configured state");
        st.ensemble = e;
    } else if (!st.ensemble && st.psi) {
        st.ensemble = Ensemble({{1.0, *st.psi}});
    }
    return st;
}

std::vector<std::string> resolve_kinds(const ScenarioConfig& c, const SystemState& st) {
    std::vector<std::string> kinds = c.kinds;
    if (kinds.empty()) kinds.push_back(st.psi ? "io" : "entanglement");
    for (const auto& k : kinds)
        if (k == "io" && !st.psi)
            throw ConfigError("fidelity_kind", "io needs a pure state; \"" + c.state_name + "\" is mixed");
    // A mixed preset without an explicit ensemble supplies its own split.
    for (const auto& k : kinds)
        if (k == "average" && !st.ensemble) throw ConfigError("ensemble", "required for the average fidelity");
    return kinds;
}

std::size_t policy_n_max(const BathModeSet& modes) {
    std::size_t n = 1;
    for (const auto& m : modes.modes) n = std::max(n, choose_n_max(m.omega, modes.temperature));
    return n;
}

double model_dimension(const ScenarioConfig& c, std::size_t n_max) {
    return std::pow(2.0, static_cast<double>(c.lattice.size())) *
           std::pow(static_cast<double>(n_max + 1), static_cast<double>(c.bath.discrete.size()));
}

void require_converged_truncation(const BathModeSet& modes, std::size_t n_max) {
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const auto& m = modes.modes[k];
        const double a = truncated_coth(m.omega, modes.temperature, n_max);
        const double b = truncated_coth(m.omega, modes.temperature, 2 * n_max);
        if (std::abs(a - b) > 1e-8 * b)
            throw NumericalError("truncation not converged: n_max = " + std::to_string(n_max) + " for mode " +
                                 std::to_string(k) + " (doubling shifts the thermal factor by " +
                                 format_double(std::abs(a - b) / b) + " relative)");
    }
}

std::string ohmic_method(const Json& config) {
    const Json& s = section(config, "correlation");
    const Json* m = find(s, "method");
    if (!m) return "auto";
    if (!m->is_string()) throw ConfigError("correlation.method", "expected a string");
    const auto v = m->get<std::string>();
    if (v != "auto" && v != "highT" && v != "lowT" && v != "quad")
        throw ConfigError("correlation.method", "unknown method \"" + v + "\" (auto, highT, lowT, quad)");
    return v;
}

CorrelationFn correlation_for(const ScenarioConfig& c, const Json& config) {
    switch (c.bath.kind) {
    case BathKind::discrete: return discrete_correlation(c.bath.discrete);
    case BathKind::gaussian: return gaussian_correlation_fn(c.bath.gaussian);
    case BathKind::ohmic: break;
    }
    std::string method = ohmic_method(config);
    if (method == "auto") method = c.bath.ohmic.temperature == 0.0 ? "lowT" : "quad";
    const OhmicBath b = c.bath.ohmic;
    if (method == "highT") return [b](double d) { return ohmic_correlation_highT(b, d); };
    if (method == "lowT") return [b](double d) { return ohmic_correlation_lowT(b, d); };
    return [b](double d) { return ohmic_correlation_quad(b, d); };
}

std::vector<double> list_field(const Json& config, const char* sec, const char* key) {
    const Json& s = section(config, sec);
    const std::string path = std::string(sec) + "." + key;
    const Json* v = find(s, key);
    if (!v) throw ConfigError(path, "required");
    return number_list(*v, path);
}

} // namespace

// ---------------------------------------------------------------------------
// Commands

CommandResult cmd_rates(const Json& config, const RunOptions& opt) {
    const ScenarioConfig c = parse_scenario(config);
    require_qubits(c);
    require_bath(c);
    const SystemState st = config_state(c);
    const auto kinds = resolve_kinds(c, st);

    CommandResult res;
    res.table.columns = {"scenario_id", "kind", "c2", "tau2", "method"};
    auto emit = [&](const std::string& kind, double c2, const char* method) {
        const ExpansionCoefficients e{0.0, c2};
        res.table.rows.push_back({c.id, kind, c2, e.tau2(), std::string(method)});
    };

    bool closed_form = false;
    std::size_t n_max = 0;
    if (c.bath.kind == BathKind::discrete) {
        n_max = c.n_max.value_or(policy_n_max(c.bath.discrete));
        // Above the cap the factorized rate stands in; parsing guarantees +-k symmetry.
        closed_form = model_dimension(c, n_max) <= static_cast<double>(opt.dimension_cap);
    }
    if (closed_form) {
        if (c.n_max) require_converged_truncation(c.bath.discrete, n_max);
        const auto model = build_hamiltonian(c.lattice, c.bath.discrete, n_max);
        const auto rho_env = thermal_env_state(c.bath.discrete, n_max);
        for (const auto& k : kinds) {
            double c2 = 0.0;
            if (k == "io")
                c2 = input_output_c2(*st.psi, model.h_i, rho_env).c2;
            else if (k == "entanglement")
                c2 = entanglement_c2(st.rho, model.h_i, rho_env).c2;
            else
                c2 = average_c2(*st.ensemble, model.h_i, rho_env).c2;
            emit(k, c2, "closed-form");
        }
    } else {
        const CorrelationFn fn = correlation_for(c, config);
        for (const auto& k : kinds) {
            double c2 = 0.0;
            if (k == "average")
                for (const auto& m : st.ensemble->members()) c2 += m.p * decoherence_rate(c.lattice, fn, m.psi.projector());
            else
                c2 = decoherence_rate(c.lattice, fn, st.rho);
            emit(k, c2, "factorized");
        }
    }
    return res;
}

CommandResult cmd_correlation(const Json& config, const RunOptions&) {
    const ScenarioConfig c = parse_scenario(config);
    require_bath(c);
    if (c.bath.kind != BathKind::ohmic && find(section(config, "correlation"), "method") &&
        ohmic_method(config) != "auto")
        throw ConfigError("correlation.method", "only the ohmic bath has alternative methods");
    const auto deltas = list_field(config, "correlation", "delta_r");
    const CorrelationFn fn = correlation_for(c, config);
    CommandResult res;
    res.table.columns = {"delta_r", "omega2", "normalized"};
    const double zero = deltas.empty() ? 0.0 : fn(0.0);
    for (double d : deltas) {
        const double v = fn(d);
        res.table.rows.push_back({d, v, zero != 0.0 ? v / zero : std::nan("")});
    }
    return res;
}

CommandResult cmd_regime(const Json& config, const RunOptions&) {
    const ScenarioConfig c = parse_scenario(config);
    require_bath(c);
    const auto ds = list_field(config, "regime", "d");
    GaussianSpectrum spec;
    switch (c.bath.kind) {
    case BathKind::gaussian: spec = c.bath.gaussian; break;
    case BathKind::discrete: spec = spectrum_moments(c.bath.discrete); break;
    case BathKind::ohmic: spec = ohmic_spectrum_moments(c.bath.ohmic); break;
    }
    if (!(spec.delta_k > 0.0)) throw ConfigError("bath", "degenerate spectrum: delta_k = 0 leaves the regime undefined");
    CommandResult res;
    res.table.columns = {"d", "kbar_d", "dk_d", "regime"};
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (!(ds[i] > 0.0)) throw ConfigError(at("regime.d", i), "spacing must be positive");
        const auto r = classify_regime(ds[i], spec);
        res.table.rows.push_back({ds[i], r.kbar_d, r.dk_d, to_string(r.regime)});
    }
    return res;
}

CommandResult cmd_verify(const Json& config, const RunOptions& opt) {
    const ScenarioConfig c = parse_scenario(config);
    const std::uint64_t seed = opt.seed.value_or(c.seed);
    const Json& sec = section(config, "verify");
    check_keys(sec, "verify", {"suite"});
    std::vector<SuiteRow> rows;
    if (const Json* s = find(sec, "suite")) {
        if (!s->is_string()) throw ConfigError("verify.suite", "expected a string");
        rows = run_suite(s->get<std::string>(), seed, opt.jobs);
    } else {
        // The configured scenario, one row per fidelity kind, plus the
        // factorized rate when the modes allow it.
        require_qubits(c);
        require_bath(c);
        if (c.bath.kind != BathKind::discrete)
            throw ConfigError("bath", "oracle verification needs a discrete bath (or set verify.suite)");
        const SystemState st = config_state(c);
        const auto kinds = resolve_kinds(c, st);
        const std::size_t n_max = c.n_max.value_or(policy_n_max(c.bath.discrete));
        if (model_dimension(c, n_max) > static_cast<double>(opt.dimension_cap))
            throw ConfigError("n_max", "total dimension " + format_double(model_dimension(c, n_max)) +
                                           " exceeds DECOLAB_NMAX_CAP = " + std::to_string(opt.dimension_cap));
        std::vector<Scenario> scenarios;
        auto add = [&](VerifyPath p) {
            Scenario s;
            s.name = c.id + "/" + to_string(p);
            s.lattice = c.lattice;
            s.modes = c.bath.discrete;
            s.n_max = n_max;
            s.path = p;
            s.rho_s = st.rho;
            s.psi = st.psi;
            s.ensemble = st.ensemble;
            scenarios.push_back(std::move(s));
        };
        for (const auto& k : kinds)
            add(k == "io" ? VerifyPath::io : k == "entanglement" ? VerifyPath::entanglement : VerifyPath::average);
        if (c.bath.discrete.is_symmetric()) add(VerifyPath::factorized);
        for (const auto& r : run_scenarios(scenarios, opt.jobs)) rows.push_back(to_row(r));
    }
    CommandResult res;
    res.table.columns = {"scenario", "c2_analytic", "c2_fitted", "rel_err", "pass"};
    std::size_t failed = 0;
    std::string first_failure;
    for (const auto& r : rows) {
        res.table.rows.push_back({r.scenario, r.c2_analytic, r.c2_fitted, r.rel_err, r.pass});
        if (!r.pass && failed++ == 0) first_failure = r.scenario + (r.message.empty() ? "" : ": " + r.message);
    }
    res.status = failed ? ExitCode::verification_failure : ExitCode::success;
    res.summary = std::to_string(rows.size() - failed) + "/" + std::to_string(rows.size()) + " passed" +
                  (failed ? "; first failure " + first_failure : "");
    return res;
}

namespace {

const std::vector<std::string>& command_columns(const std::string& cmd) {
    static const std::vector<std::string> rates{"scenario_id", "kind", "c2", "tau2", "method"};
    static const std::vector<std::string> corr{"delta_r", "omega2", "normalized"};
    static const std::vector<std::string> regime{"d", "kbar_d", "dk_d", "regime"};
    if (cmd == "rates") return rates;
    if (cmd == "correlation") return corr;
    if (cmd == "regime") return regime;
    throw ConfigError("sweep.command", "unknown command \"" + cmd + "\" (rates, correlation, regime)");
}

std::vector<double> sweep_values(const Json& s) {
    if (const Json* v = find(s, "values")) {
        if (find(s, "start") || find(s, "stop") || find(s, "count"))
            throw ConfigError("sweep.values", "give either values or start/stop/count, not both");
        const auto out = number_list(*v, "sweep.values");
        bool up = true, down = true;
        for (std::size_t i = 1; i < out.size(); ++i) {
            up = up && out[i] > out[i - 1];
            down = down && out[i] < out[i - 1];
        }
        if (!(up || down)) throw ConfigError("sweep.values", "must be strictly increasing or strictly decreasing");
        return out;
    }
    const double start = required_number(s, "start", "sweep");
    const double stop = required_number(s, "stop", "sweep");
    const Json* cnt = find(s, "count");
    if (!cnt) throw ConfigError("sweep.count", "required");
    const auto count = non_negative_integer(*cnt, "sweep.count");
    if (count > 1000000) throw ConfigError("sweep.count", "at most 1000000 points");
    std::string scale = "linear";
    if (const Json* sc = find(s, "scale")) {
        if (!sc->is_string()) throw ConfigError("sweep.scale", "expected \"linear\" or \"log\"");
        scale = sc->get<std::string>();
        if (scale != "linear" && scale != "log") throw ConfigError("sweep.scale", "expected \"linear\" or \"log\"");
    }
    if (scale == "log" && !(start > 0.0 && stop > 0.0))
        throw ConfigError("sweep.start", "log scale needs positive start and stop");
    std::vector<double> out;
    for (std::uint64_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        out.push_back(scale == "linear" ? start + f * (stop - start)
                                        : std::exp(std::log(start) + f * (std::log(stop) - std::log(start))));
    }
    if (count > 0) out.front() = start;
    if (count > 1) out.back() = stop;
    return out;
}

// Writes `value` at the swept parameter of a config copy.
void apply_parameter(Json& cfg, const std::string& param, double value, const std::string& cmd) {
    if (param == "spacing" || param == "d") {
        if (cmd == "correlation") cfg["correlation"]["delta_r"] = Json::array({value});
        if (cmd == "regime") cfg["regime"]["d"] = Json::array({value});
        if (cfg.contains("qubits") && cfg["qubits"].is_array())
            for (std::size_t i = 0; i < cfg["qubits"].size(); ++i)
                cfg["qubits"][i]["position"] = value * static_cast<double>(i);
        return;
    }
    std::string path = param;
    if (param == "temperature") {
        if (!cfg.contains("bath") || !cfg["bath"].is_object() || cfg["bath"].size() != 1)
            throw ConfigError("sweep.parameter", "\"temperature\" needs a bath");
        path = "bath." + cfg["bath"].begin().key() + ".temperature";
        if (cfg["bath"].begin().key() == "gaussian")
            throw ConfigError("sweep.parameter", "the gaussian bath has no temperature");
        cfg["bath"].begin().value()["temperature"] = value;
        return;
    }
    Json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (!node->is_object() || !node->contains(key))
            throw ConfigError("sweep.parameter", "\"" + param + "\" is not present in the scenario");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    if (!node->is_number()) throw ConfigError("sweep.parameter", "\"" + param + "\" is not a number");
    *node = value;
}

} // namespace

CommandResult cmd_sweep(const Json& config, const RunOptions& opt) {
    const Json& s = section(config, "sweep");
    if (!find(config, "sweep")) throw ConfigError("sweep", "required");
    check_keys(s, "sweep", {"parameter", "values", "start", "stop", "count", "scale", "command", "columns"});
    const Json* p = find(s, "parameter");
    if (!p || !p->is_string()) throw ConfigError("sweep.parameter", "required (a dotted field path)");
    const std::string param = p->get<std::string>();
    const Json* cmdj = find(s, "command");
    if (!cmdj || !cmdj->is_string()) throw ConfigError("sweep.command", "required (rates, correlation, regime)");
    const std::string cmd = cmdj->get<std::string>();
    const auto& sub_columns = command_columns(cmd);
    std::vector<std::size_t> keep;
    if (const Json* cols = find(s, "columns")) {
        if (!cols->is_array()) throw ConfigError("sweep.columns", "expected a list of column names");
        for (std::size_t i = 0; i < cols->size(); ++i) {
            const std::string path = at("sweep.columns", i);
            if (!(*cols)[i].is_string()) throw ConfigError(path, "expected a string");
            const auto name = (*cols)[i].get<std::string>();
            const auto it = std::find(sub_columns.begin(), sub_columns.end(), name);
            if (it == sub_columns.end()) throw ConfigError(path, "unknown column \"" + name + "\" for " + cmd);
            keep.push_back(static_cast<std::size_t>(it - sub_columns.begin()));
        }
    } else {
        for (std::size_t i = 0; i < sub_columns.size(); ++i) keep.push_back(i);
    }
    const auto values = sweep_values(s);

    Json base = config;
    base.erase("sweep");
    // Validate the parameter path and the base scenario once, up front, so a
    // bad config is a config error rather than a column of per-point errors.
    {
        Json probe = base;
        apply_parameter(probe, param, values.empty() ? 1.0 : values.front(), cmd);
        parse_scenario(probe);
    }

    CommandResult res;
    res.table.columns = {param};
    for (auto i : keep) res.table.columns.push_back(sub_columns[i]);
    res.table.columns.push_back("error");

    std::vector<std::vector<std::vector<Cell>>> per_point(values.size());
    RunOptions inner = opt;
    inner.jobs = 1;
    parallel_for(values.size(), opt.jobs, [&](std::size_t i) {
        auto& out = per_point[i];
        try {
            Json cfg = base;
            apply_parameter(cfg, param, values[i], cmd);
            const CommandResult r = run_command(cmd, cfg, inner);
            for (const auto& row : r.table.rows) {
                std::vector<Cell> line{values[i]};
                for (auto k : keep) line.push_back(row[k]);
                line.emplace_back(std::string());
                out.push_back(std::move(line));
            }
        } catch (const std::exception& e) {
            std::vector<Cell> line{values[i]};
            for (std::size_t k = 0; k < keep.size(); ++k) line.emplace_back(std::monostate{});
            line.emplace_back(std::string(e.what()));
            out.push_back(std::move(line));
        }
    });
    std::size_t failed = 0;
    for (auto& pt : per_point)
        for (auto& row : pt) {
            if (!std::get<std::string>(row.back()).empty()) ++failed;
            res.table.rows.push_back(std::move(row));
        }
    res.summary = std::to_string(values.size()) + " sweep points, " + std::to_string(failed) + " failed";
    return res;
}

CommandResult run_command(const std::string& name, const Json& config, const RunOptions& opt) {
    if (name == "rates") return cmd_rates(config, opt);
    if (name == "correlation") return cmd_correlation(config, opt);
    if (name == "regime") return cmd_regime(config, opt);
    if (name == "verify") return cmd_verify(config, opt);
    if (name == "sweep") return cmd_sweep(config, opt);
    throw ConfigError("<command>", "unknown command \"" + name + "\"");
}

ExitCode exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvalidArgument*>(&e)) return ExitCode::config_error;
    if (dynamic_cast<const Json::exception*>(&e)) return ExitCode::config_error;
    return ExitCode::non_convergence;
}

} // namespace decolab
