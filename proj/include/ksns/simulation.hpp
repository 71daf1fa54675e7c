#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ksns/config.hpp"
#include "ksns/diagnostics.hpp"
#include "ksns/state.hpp"

namespace ksns {

enum class TerminationReason { Completed, BlowupDetected, SolverDivergence, StepRejectedLimit };

std::string to_string(TerminationReason r);

struct RunResult {
    SimState final_state;
    /// Time-ordered; a blow-up caused by non-finite fields ends with a NaN record.
    std::vector<DiagnosticsRecord> records;
    TerminationReason reason = TerminationReason::Completed;
    std::string message;
    long steps = 0;
    long rejections = 0;
    /// Largest sup_n seen at any accepted step, recorded or not.
    double sup_n_max = 0.0;
};

struct StepInfo {
    long step = 0;
    double dt = 0.0;
};

/// Called after every accepted step with the new state.
using StepObserver = std::function<void(const SimState&, const StepInfo&)>;

struct RunOptions {
    /// Replaces the grid described by config.grid (same nx, ny, lx, ly expected).
    GridPtr grid;
    StepObserver observer;
};

GridPtr make_grid(const GridSpec& spec);
/// Initial n, c, u at t = 0 on grid; Gaussian bumps carry exactly `mass` in the discrete
/// integral.
SimState make_initial_state(const InitialSpec& spec, const GridPtr& grid);
ScalarField make_potential(const PotentialSpec& spec, const GridPtr& grid);

/// Time-steps the coupled system from the configured initial data to t_end.
///
/// Each step applies the c update, then the n update, then the fluid step, each seeing the
/// newest fields; with numerics.strang the sequence is c/2, n/2, fluid, n/2, c/2. Rejected
/// steps are retried with half the step. When output.directory is set the run writes
/// series.csv, config.cfg and field snapshots there.
RunResult run_simulation(const SimConfig& config, const RunOptions& options = {});

}  // namespace ksns
