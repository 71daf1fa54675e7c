// Command-line front end: run, sweep-alpha, study-eps, converge.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "ksns/config.hpp"
#include "ksns/errors.hpp"
#include "ksns/io.hpp"
#include "ksns/simulation.hpp"
#include "ksns/studies.hpp"

namespace {

constexpr int kExitCompleted = 0;
constexpr int kExitBlowup = 2;
constexpr int kExitSolver = 3;
constexpr int kExitConfig = 4;
constexpr int kExitRejected = 5;

int exit_code(ksns::TerminationReason r) {
    switch (r) {
        case ksns::TerminationReason::Completed: return kExitCompleted;
        case ksns::TerminationReason::BlowupDetected: return kExitBlowup;
        case ksns::TerminationReason::SolverDivergence: return kExitSolver;
        case ksns::TerminationReason::StepRejectedLimit: return kExitRejected;
    }
    return 1;
}

// Writes to out_dir/name when an output directory is known, else to stdout.
void emit(const std::string& out_dir, const std::string& name, const std::string& text) {
    if (out_dir.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(out_dir);
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    ksns::write_text_file(path, text);
    std::cerr << "wrote " << path << "\n";
}

ksns::SimConfig load(const std::string& path, const std::string& out_dir) {
    ksns::SimConfig cfg = ksns::load_config(path);
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized chemotaxis-Navier-Stokes simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<double> alphas;
    std::vector<double> eps;
    std::vector<int> res;

    auto* run = app.add_subcommand("run", "Run one simulation");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output.directory)");

    auto* sweep = app.add_subcommand("sweep-alpha", "One run per saturation exponent");
    sweep->add_option("config", config_path, "Base config file")->required();
    sweep->add_option("--alphas", alphas, "Comma-separated alpha values")->required()->delimiter(',');
    sweep->add_option("--out", out_dir, "Output directory");

    auto* study = app.add_subcommand("study-eps", "Runs over decreasing regularization eps");
    study->add_option("config", config_path, "Base config file")->required();
    study->add_option("--eps", eps, "Comma-separated eps values, decreasing")->required()->delimiter(',');
    study->add_option("--out", out_dir, "Output directory");

    auto* converge = app.add_subcommand("converge", "Manufactured-solution convergence orders");
    converge->add_option("config", config_path, "Base config file")->required();
    converge->add_option("--res", res, "Comma-separated nested resolutions")->required()->delimiter(',');
    converge->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) {
            ksns::SimConfig cfg = load(config_path, out_dir);
            const ksns::RunResult r = ksns::run_simulation(cfg);
            if (cfg.output.directory.empty()) std::cout << ksns::records_to_csv(r.records);
            std::cerr << ksns::to_string(r.reason) << " after " << r.steps << " steps, t = "
                      << r.final_state.t << (r.message.empty() ? "" : ": " + r.message) << "\n";
            return exit_code(r.reason);
        }
        if (*sweep) {
            ksns::SimConfig cfg = load(config_path, out_dir);
            emit(cfg.output.directory, "alpha_sweep.csv", ksns::to_csv(ksns::alpha_sweep(cfg, alphas)));
        } else if (*study) {
            ksns::SimConfig cfg = load(config_path, out_dir);
            emit(cfg.output.directory, "eps_study.csv",
                 ksns::to_csv(ksns::regularization_study(cfg, eps)));
        } else if (*converge) {
            ksns::SimConfig cfg = load(config_path, "");
            emit(out_dir, "convergence.csv", ksns::to_csv(ksns::convergence_study(cfg, res)));
        }
        return kExitCompleted;
    } catch (const ksns::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ksns::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ksns::SolverDivergence& e) {
        std::cerr << "solver divergence: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
