// Command-line entry point: run, check, dofs, mms.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hmc/config.hpp"
#include "hmc/diagnostics.hpp"
#include "hmc/driver.hpp"
#include "hmc/errors.hpp"
#include "hmc/log.hpp"
#include "hmc/studies.hpp"

namespace {

// A config argument is either a file on disk or a preset name.
hmc::SimulationConfig load(const std::string& arg) {
    if (std::filesystem::exists(arg)) return hmc::parse_config(arg);
    for (const auto& name : hmc::preset_names())
        if (name == arg) return hmc::preset_config(arg);
    throw hmc::IoError("no config file or preset named '" + arg + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hmc: coupled hydro-mechanical-chemical finite element simulator"};
    app.require_subcommand(1);

    std::string config_arg, output_dir, mms_case;
    std::optional<int> cadence, max_steps;
    std::optional<std::uint64_t> seed;
    bool quiet = false, verbose = false;

    auto* run = app.add_subcommand("run", "Run a simulation");
    run->add_option("config", config_arg, "Config file or preset name")->required();
    run->add_option("--output-dir", output_dir, "Directory for VTK and CSV output");
    run->add_option("--cadence", cadence, "Write fields every N steps (0 disables)");
    run->add_option("--seed", seed, "Random permeability seed");
    run->add_option("--max-steps", max_steps, "Stop after N steps");
    run->add_flag("--quiet", quiet, "Only print errors");
    run->add_flag("-v,--verbose", verbose, "Print one line per step");

    auto* check = app.add_subcommand("check", "Validate a config and print its explicit form");
    check->add_option("config", config_arg, "Config file or preset name")->required();
    check->add_flag("--quiet", quiet, "Do not print the expanded config");

    auto* dofs = app.add_subcommand("dofs", "Mesh and space dimensions of a config");
    dofs->add_option("config", config_arg, "Config file or preset name")->required();

    auto* mms = app.add_subcommand("mms", "Manufactured-solution convergence study");
    mms->add_option("case", mms_case, "darcy or transport")->required()->check(CLI::IsMember({"darcy", "transport"}));

    CLI11_PARSE(app, argc, argv);

    std::string stage = "config";
    try {
        if (*run) {
            hmc::SimulationConfig cfg = load(config_arg);
            if (!output_dir.empty()) cfg.output.dir = output_dir;
            if (cadence) cfg.output.cadence = *cadence;
            if (seed) cfg.randfield.spec.seed = *seed;
            if (max_steps) cfg.time.max_steps = *max_steps;
            cfg.validate();
            hmc::log_level() = quiet ? hmc::LogLevel::quiet : verbose ? hmc::LogLevel::info : hmc::LogLevel::warning;
            std::filesystem::create_directories(cfg.output.dir);
            {
                std::ofstream echo(std::filesystem::path(cfg.output.dir) / "config.ini");
                echo << hmc::serialize_config(cfg);
            }
            stage = "run";
            const hmc::RunSummary s = hmc::run_simulation(cfg);
            if (!quiet) {
                std::cout << "steps " << s.steps << ", t = " << s.t << " s\n"
                          << "fixed-stress iterations: first step " << s.first_step_iterations << ", later max "
                          << s.max_later_iterations << "\n"
                          << "max |r_mass| " << s.max_r_mass << ", max telescoping defect " << s.max_telescoping
                          << "\n"
                          << "output in " << cfg.output.dir << "\n";
            }
        } else if (*check) {
            const hmc::SimulationConfig cfg = load(config_arg);
            if (!quiet) std::cout << hmc::serialize_config(cfg);
        } else if (*dofs) {
            const hmc::SimulationConfig cfg = load(config_arg);
            stage = "mesh";
            const hmc::Mesh mesh = hmc::build_mesh(cfg.mesh);
            std::cout << hmc::format_dof_report(hmc::dof_report(mesh));
        } else if (*mms) {
            stage = "mms";
            if (mms_case == "darcy")
                std::cout << hmc::format_convergence("Darcy BDM1 x DG0, p = cos(pi x) cos(pi y)", hmc::darcy_mms(),
                                                     "|q-q_h|", "|p-p_h|");
            else
                std::cout << hmc::format_convergence("EG1 transport, c = cos(pi x) cos(pi y)", hmc::transport_mms(),
                                                     "|c-c_h|");
        }
    } catch (const hmc::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error (" << stage << "): " << e.what() << '\n';
        return 1;
    }
    return 0;
}
