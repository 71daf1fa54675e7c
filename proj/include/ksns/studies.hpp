#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksns/config.hpp"
#include "ksns/simulation.hpp"

namespace ksns {

/// Worker count for sweeps: KSNS_THREADS if set to a positive integer, else 1.
int sweep_threads();

/// Summary of one run inside a sweep. `error` is set (and `reason` empty) when the run
/// could not be started or threw.
struct RunSummary {
    double parameter = 0.0;
    double sup_n = 0.0;
    double sup_energy = 0.0;
    std::optional<TerminationReason> reason;
    std::string error;
    long steps = 0;
    std::string status() const { return reason ? to_string(*reason) : "error"; }
};

struct AlphaSweep {
    std::vector<RunSummary> rows;
};

/// One run per alpha with everything else taken from base. Runs execute on
/// sweep_threads() workers; rows keep the order of `alphas`. Per-run output (when
/// base.output.directory is set) goes to a subdirectory per alpha.
AlphaSweep alpha_sweep(const SimConfig& base, const std::vector<double>& alphas,
                       int threads = 0);
std::string to_csv(const AlphaSweep& sweep);

struct EpsDistance {
    double eps_from = 0.0;
    double eps_to = 0.0;
    double dist_n = 0.0;
    double dist_c = 0.0;
    double dist_u = 0.0;
};

struct RegularizationStudy {
    std::vector<RunSummary> rows;
    /// Discrete L2 distances of the final fields between consecutive eps values; NaN when
    /// either run failed.
    std::vector<EpsDistance> distances;
};

/// eps_list must be positive and strictly decreasing; zero is allowed as the last entry.
RegularizationStudy regularization_study(const SimConfig& base, const std::vector<double>& eps_list,
                                         int threads = 0);
std::string to_csv(const RegularizationStudy& study);

struct OrderEstimate {
    std::string name;
    std::vector<double> errors;  ///< relative discrete L2 error per resolution
    std::vector<double> orders;  ///< log2 of consecutive error ratios
    double min_order() const;
};

struct ConvergenceReport {
    std::vector<int> resolutions;
    std::vector<OrderEstimate> estimates;  ///< diffusion, poisson, helmholtz, advection
    const OrderEstimate& find(const std::string& name) const;
};

/// Manufactured-solution errors of the sub-solvers on the base domain shape and size at
/// n x n cells for each n in resolutions. Needs at least three resolutions, each twice
/// the previous one.
ConvergenceReport convergence_study(const SimConfig& base, const std::vector<int>& resolutions);
std::string to_csv(const ConvergenceReport& report);

}  // namespace ksns
