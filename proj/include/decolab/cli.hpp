// cli.hpp: configuration schema, output tables and the command
// implementations behind the `decolab` executable.

#pragma once

#include "decolab/error.hpp"
#include "decolab/fidelity_expansion.hpp"
#include "decolab/qubit_bath.hpp"
#include "decolab/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace decolab {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// Shortest decimal that round-trips; "inf", "-inf", "nan" for non-finite.
std::string format_double(double v);
std::string to_csv(const Table& t);
std::string to_json(const Table& t);

// ---------------------------------------------------------------------------
// Configuration

enum class BathKind { discrete, ohmic, gaussian };

struct BathConfig {
    BathKind kind = BathKind::discrete;
    BathModeSet discrete;
    OhmicBath ohmic;
    GaussianSpectrum gaussian;
};

struct ScenarioConfig {
    std::string id = "scenario";
    QubitLattice lattice; // no qubits when the config has none
    bool has_bath = false;
    BathConfig bath;
    std::string state_name;          // preset, "amplitudes", or empty when absent
    std::optional<Vector> amplitudes;
    std::vector<std::string> kinds;  // io | entanglement | average
    std::optional<std::vector<EnsembleMember>> ensemble;
    std::optional<std::size_t> n_max;
    std::uint64_t seed = 0;
};

// Throws ConfigError naming the offending field path.
ScenarioConfig parse_scenario(const Json& config);
Json load_config_file(const std::string& path);

struct RunOptions {
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed; // overrides the config seed
    std::size_t dimension_cap = 4096;
};

// DECOLAB_NMAX_CAP, default 4096. Throws ConfigError on a malformed value.
std::size_t dimension_cap_from_env();

struct CommandResult {
    Table table;
    ExitCode status = ExitCode::success;
    std::string summary; // one line for humans, written to stderr
};

CommandResult cmd_rates(const Json& config, const RunOptions& opt);
CommandResult cmd_correlation(const Json& config, const RunOptions& opt);
CommandResult cmd_regime(const Json& config, const RunOptions& opt);
CommandResult cmd_verify(const Json& config, const RunOptions& opt);
CommandResult cmd_sweep(const Json& config, const RunOptions& opt);

// Dispatch by name; unknown names are a ConfigError.
CommandResult run_command(const std::string& name, const Json& config, const RunOptions& opt);

// Exit code for an exception escaping a command.
ExitCode exit_code_for(const std::exception& e);

} // namespace decolab
