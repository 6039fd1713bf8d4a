#pragma once

// Command-line front end: argument parsing, config overrides, file output.

#include "config.hpp"
#include "scenarios.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace oamclone::cli {

enum ExitCode : int { ok = 0, runtime_failure = 1, parse_failure = 2, validation_failure = 3 };

inline OrderedJson output_document(const Config& c, const Artifacts& a) {
    OrderedJson doc;
    doc["tool"] = "oamclone";
    doc["version"] = kVersion;
    doc["scenario"] = to_string(*c.scenario);
    doc["seed"] = c.seed;
    doc["config"] = config_echo(c);
    doc["results"] = a.results;
    return doc;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("failed writing " + p.string());
}

/// Writes the requested files and returns their paths.
inline std::vector<std::filesystem::path> write_artifacts(const Config& c, const Artifacts& a) {
    namespace fs = std::filesystem;
    const fs::path dir(c.output.out_dir);
    fs::create_directories(dir);
    const std::string stem = to_string(*c.scenario);
    std::vector<fs::path> written;
    if (c.output.format != "json") {
        const std::vector<std::string> preamble{std::string("oamclone ") + kVersion + " scenario=" + stem,
                                                "seed=" + std::to_string(c.seed), "config=" + config_echo(c).dump()};
        written.push_back(dir / (stem + ".csv"));
        write_file(written.back(), a.csv.str(preamble));
    }
    if (c.output.format != "csv") {
        written.push_back(dir / (stem + ".json"));
        write_file(written.back(), output_document(c, a).dump(2) + "\n");
    }
    if (a.svg) {
        written.push_back(dir / (stem + ".svg"));
        write_file(written.back(), *a.svg);
    }
    return written;
}

struct Flags {
    std::string config;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string format;
    bool svg = false;
};

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation of OAM photon coalescence and optimal quantum cloning", "oamclone"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1, 1);

    Flags flags;
    std::vector<std::pair<CLI::App*, std::string>> subs;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"hom", "two-photon coalescence delay scan"},
        {"clone", "1->2 universal cloner over a set of input qubits"},
        {"qudit", "cloning of d-level states, scan over d"},
        {"experiment", "simulated counts for the six-state fidelity table"},
        {"stokes", "Bloch-vector shrinking with counting noise"},
        {"validate", "check a config and print it with defaults applied"}};
    std::map<std::string, CLI::Option*> seed_opts;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON config file");
        seed_opts[name] = sub->add_option("--seed", flags.seed, "64-bit seed (overrides config)");
        sub->add_option("--out-dir", flags.out_dir, "output directory (overrides config)");
        sub->add_option("--format", flags.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_flag("--svg", flags.svg, "also write an SVG figure (hom, stokes)");
        subs.push_back({sub, name});
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return ok;
        }
        err << "error: " << e.what() << "\n";
        return parse_failure;
    }

    std::string command;
    for (const auto& [sub, name] : subs)
        if (sub->parsed()) command = name;

    Config c;
    try {
        if (!flags.config.empty()) c = load_config(flags.config);
        if (command != "validate") {
            const auto s = scenario_from_string(command);
            if (c.scenario && *c.scenario != *s)
                throw ValidationError(std::string("scenario: config is for '") + to_string(*c.scenario) +
                                      "' but the subcommand is '" + command + "'");
            c.scenario = s;
        }
        if (seed_opts[command]->count()) c.seed = flags.seed;
        if (!flags.out_dir.empty()) c.output.out_dir = flags.out_dir;
        if (!flags.format.empty()) c.output.format = flags.format;
        if (flags.svg) c.output.svg = true;
        validate(c);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return parse_failure;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return validation_failure;
    }

    if (command == "validate") {
        OrderedJson doc = config_echo(c);
        doc["output"] = {{"out_dir", c.output.out_dir}, {"format", c.output.format}, {"svg", c.output.svg}};
        out << doc.dump(2) << "\n";
        return ok;
    }

    try {
        const Artifacts a = run_scenario(c);
        for (const auto& p : write_artifacts(c, a)) out << "wrote " << p.string() << "\n";
        return ok;
    } catch (const ConfigurationError& e) {
        err << "validation error: " << e.what() << "\n";
        return validation_failure;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return runtime_failure;
    }
}

}  // namespace oamclone::cli
