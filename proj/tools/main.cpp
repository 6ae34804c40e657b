#include "lineid/errors.hpp"
#include "lineid/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    bool emit_truth = false;
    std::string out_dir;
};

lineid::ScenarioConfig load(const std::string& path, const Overrides& o) {
    lineid::ScenarioConfig cfg = path.empty() ? lineid::default_config() : lineid::load_config(path);
    if (o.seed) cfg.noise.seed = *o.seed;
    if (o.emit_truth) cfg.output.emit_truth = true;
    if (!o.out_dir.empty()) cfg.output.dir = o.out_dir;
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    return cfg;
}

int exit_code(lineid::ErrorCategory c) {
    switch (c) {
        case lineid::ErrorCategory::Config: return 2;
        case lineid::ErrorCategory::Io: return 3;
        case lineid::ErrorCategory::Numerical: return 4;
        case lineid::ErrorCategory::NoSolution: return 5;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online line-impedance estimation scenarios"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--seed", o.seed, "Override noise.seed");
    app.add_flag("--emit-truth", o.emit_truth, "Write measurements.csv with ground-truth columns");
    app.add_option("--out-dir", o.out_dir, "Override output.dir");

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run one scenario and write its artifacts");
    run->add_option("config", config_path, "Scenario config file (defaults when omitted)");

    std::string suite_name;
    auto* ablate = app.add_subcommand("ablate", "Run an ablation suite and print the combined report");
    ablate->add_option("config", config_path, "Base scenario config file (defaults when omitted)");
    ablate->add_option("--suite", suite_name, "algorithms | axes | freq_source | filters")->required();

    auto* defaults = app.add_subcommand("defaults", "Print the default configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*defaults) {
            std::cout << lineid::to_text(lineid::default_config());
            return 0;
        }
        lineid::ScenarioConfig cfg = load(config_path, o);
        if (*run) {
            const lineid::RunArtifacts art = lineid::run_scenario(cfg);
            std::cout << art.report.to_table();
            std::cout << "wrote " << art.timeseries_csv.string() << ", " << art.report_csv.string() << ", "
                      << art.meta_json.string();
            if (!art.measurements_csv.empty()) std::cout << ", " << art.measurements_csv.string();
            std::cout << "\nconfig " << art.config_hash << "  measurements " << art.measurement_hash << "\n";
            return 0;
        }
        const lineid::AblationSuite suite = lineid::parse_suite(suite_name);
        const lineid::AblationResult res = lineid::run_ablation_suite(cfg, suite);
        std::cout << res.report.to_table();
        std::filesystem::create_directories(cfg.output.dir);
        const auto path = std::filesystem::path(cfg.output.dir) / ("ablation_" + suite_name + ".csv");
        lineid::write_atomic(path, res.report.to_csv());
        std::cout << "wrote " << path.string() << "\n";
        return 0;
    } catch (const lineid::ConfigError& e) {
        std::cerr << "error[config]: invalid configuration\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
        return exit_code(e.category());
    } catch (const lineid::NumericalFault& e) {
        std::fprintf(stderr, "error[numerical]: %s (last good t = %.6f s)\n", e.what(), e.last_good_t());
        return exit_code(e.category());
    } catch (const lineid::Error& e) {
        std::cerr << "error[" << lineid::to_string(e.category()) << "]: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error[io]: " << e.what() << "\n";
        return exit_code(lineid::ErrorCategory::Io);
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
}
