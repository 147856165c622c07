// decolab: short-time decoherence rates for qubits in a bosonic bath.

#include "decolab/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    using namespace decolab;

    CLI::App app{"Short-time decoherence rates, spatial bath correlations and oracle verification"};
    app.require_subcommand(1, 1);
    std::string config_path, out_path, format = "csv";
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;

    for (const char* name : {"rates", "correlation", "regime", "verify", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON scenario file")->required();
        sub->add_option("--out", out_path, "write the table here instead of stdout");
        sub->add_option("--jobs", jobs, "parallel scenarios / sweep points")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "overrides the config seed");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ExitCode::config_error);
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunOptions opt;
        opt.jobs = jobs;
        opt.seed = seed;
        opt.dimension_cap = dimension_cap_from_env();
        const Json config = load_config_file(config_path);
        const CommandResult res = run_command(command, config, opt);
        const std::string text = format == "json" ? to_json(res.table) : to_csv(res.table);
        if (out_path.empty()) {
            std::cout << text << std::flush;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw ConfigError("--out", "cannot write \"" + out_path + "\"");
            out << text;
        }
        if (!res.summary.empty()) std::cerr << command << ": " << res.summary << "\n";
        return static_cast<int>(res.status);
    } catch (const std::exception& e) {
        std::cerr << "decolab " << command << ": " << e.what() << "\n";
        return static_cast<int>(exit_code_for(e));
    }
}
