#include "risaoi/experiment.hpp"
#include "risaoi/selftest.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> seeds;
    std::optional<std::string> schemes;
    std::optional<std::string> sweep;
    std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Overrides& o, bool withSweep) {
    cmd->add_option("--config", o.config, "Configuration file (key = value lines)")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Data CSV path; the summary goes next to it as <name>_summary.csv");
    cmd->add_option("--seeds", o.seeds, "Seed list, e.g. 1-20 or 3,5,8");
    cmd->add_option("--scheme", o.schemes, "Comma-separated schemes: proposed, ra-oc-rps, ra-rc-rps, no-ris");
    if (withSweep) cmd->add_option("--sweep", o.sweep, "Sweep as key=v1,v2,..., e.g. elements=10,30,50");
    cmd->add_option("--jobs", o.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
}

risaoi::ExperimentConfig resolve(const Overrides& o) {
    risaoi::ExperimentConfig c = o.config.empty() ? risaoi::ExperimentConfig{} : risaoi::load_config(o.config);
    if (o.out) c.output = *o.out;
    if (o.seeds) c.seeds = risaoi::parse_seed_list(*o.seeds);
    if (o.schemes) c.schemes = risaoi::parse_scheme_list(*o.schemes);
    if (o.jobs) c.jobs = *o.jobs;
    if (o.sweep) {
        const auto eq = o.sweep->find('=');
        if (eq == std::string::npos) throw risaoi::ConfigError("--sweep: expected key=v1,v2,...");
        risaoi::set_config_value(c, "sweep_var", o.sweep->substr(0, eq));
        risaoi::set_config_value(c, "sweep_values", o.sweep->substr(eq + 1));
    }
    risaoi::validate_experiment(c);
    return c;
}

int execute(risaoi::ExperimentConfig c) {
    risaoi::PhaseCache cache;
    const auto result = risaoi::run_sweep(c, &cache);
    risaoi::write_csv(result, c.output);
    std::cerr << "wrote " << result.rows.size() << " rows to " << c.output << " and " << result.summary.size()
              << " rows to " << risaoi::summary_path(c.output) << "\n";
    return 0;
}

int selftest() {
    namespace st = risaoi::selftest;
    struct Named {
        const char* name;
        st::CheckResult result;
    };
    const Named checks[] = {
        {"hungarian optimality", st::hungarian_optimality(200, 11)},
        {"power interval", st::power_interval(200, 12)},
        {"sdr single user", st::sdr_single_user(20, 13)},
        {"sdr multi user", st::sdr_multi_user(10, 10000, 14)},
        {"sdp validity", st::sdp_validity(20, 2000, 15)},
        {"aoi renewal", st::aoi_renewal(0.5, 20000, 10, 16)},
    };
    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.result.pass ? "PASS " : "FAIL ") << c.name << ": " << c.result.detail << "\n";
        all = all && c.result.pass;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted uplink NOMA age-of-information simulator"};
    app.require_subcommand(1);

    Overrides run_o, sweep_o, echo_o;
    auto* run = app.add_subcommand("run", "Run the configured point once per scheme and seed (no sweep)");
    add_common(run, run_o, false);
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write data and summary CSVs");
    add_common(sweep, sweep_o, true);
    auto* echo = app.add_subcommand("echo-config", "Print the effective configuration");
    add_common(echo, echo_o, true);
    auto* self = app.add_subcommand("selftest", "Run the built-in oracle checks");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) {
            auto c = resolve(run_o);
            c.sweepVar = "none";
            c.sweepValues.clear();
            return execute(c);
        }
        if (sweep->parsed()) {
            const auto c = resolve(sweep_o);
            if (c.sweepVar == "none") throw risaoi::ConfigError("sweep: no sweep_var given (use --sweep key=v1,v2)");
            return execute(c);
        }
        if (echo->parsed()) {
            const auto c = resolve(echo_o);
            const std::string text = risaoi::write_config(c);
            if (echo_o.out)
                risaoi::write_text_file(*echo_o.out, text);
            else
                std::cout << text;
            return 0;
        }
        if (self->parsed()) return selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
