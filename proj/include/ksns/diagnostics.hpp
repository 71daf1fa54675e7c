#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "ksns/state.hpp"

namespace ksns {

/// Functionals of one state. Gradient norms are the Dirichlet forms of the 5-point
/// Laplacian (Neumann for c, no-slip for u), so they are exactly the quantities the
/// implicit diffusion solves dissipate.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_n = 0.0;      ///< integral of n
    double mass_c = 0.0;      ///< integral of c
    double norm_n_1pa = 0.0;  ///< integral of |n|^(1 + alpha)
    double grad_c_sq = 0.0;   ///< ||grad c||_2^2
    double energy = 0.0;      ///< norm_n_1pa + grad_c_sq
    double sup_n = 0.0;
    double sup_grad_c = 0.0;  ///< max over cells of the centred gradient magnitude
    double kinetic = 0.0;     ///< 0.5 ||u||_2^2
    double enstrophy = 0.0;   ///< ||grad u||_2^2
    double div_residual = 0.0;
    double min_n = 0.0;
    double min_c = 0.0;

    static constexpr std::size_t kColumns = 13;
    static const std::array<std::string_view, kColumns>& column_names();
    std::array<double, kColumns> values() const;
    static DiagnosticsRecord from_values(const std::array<double, kColumns>& v);

    bool operator==(const DiagnosticsRecord&) const = default;
};

/// Throws NumericalBreakdown naming the first non-finite field.
DiagnosticsRecord compute_record(const SimState& state, double alpha);

/// Sampled y and h on a uniform time grid for y' + A y <= h.
struct GronwallInput {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> h;
    double a = 1.0;
    double sigma = 1.0;
};

/// Largest trapezoidal integral of h over windows of length sigma that start or end at a
/// sample (window ends between samples are interpolated linearly).
double gronwall_window_sup(const GronwallInput& input);

/// max{y(t0) + B, B / (A tau) + 2 B} with B = gronwall_window_sup(input).
double gronwall_bound(const GronwallInput& input, double tau);
double gronwall_bound(const GronwallInput& input);  ///< tau = sigma

struct GronwallVerdict {
    bool holds = true;
    std::size_t index = 0;        ///< first violating sample when !holds
    double violation_time = 0.0;  ///< t at that sample
    double bound = 0.0;
    double window_sup = 0.0;
};

/// y_i <= bound + rel_tol * max(1, bound) at every sample; equality holds.
GronwallVerdict check_gronwall(const GronwallInput& input, double tau, double rel_tol = 1e-6);

struct EnergyReport {
    double c_a = 0.0;
    double c_b = 0.0;
    std::vector<double> de_dt;  ///< per record
    double fraction_all = 0.0;
    double fraction_interior = 0.0;
    std::size_t samples = 0;
};

/// Fits the pair (C_a, C_b) >= 0 minimizing the mean of C_a * enstrophy * E + C_b that
/// bounds the sampled dE/dt everywhere, then reports how often the inequality holds.
/// Records must be uniformly spaced in t; at least three are required.
EnergyReport energy_inequality_monitor(const std::vector<DiagnosticsRecord>& records);

struct BlowupThresholds {
    double sup_n_max = 1e6;
    double sup_grad_c_max = 1e8;
    /// Largest admitted ratio sup_n(step) / sup_n(previous step).
    double growth_ratio_max = 1.5;
    /// Ratios are only tested once the previous sup_n exceeds this floor.
    double growth_floor = 1.0;

    void validate() const;
};

enum class BlowupVerdict { Ok, SuspectedBlowup };

BlowupVerdict blowup_detector(const DiagnosticsRecord& record, const BlowupThresholds& thresholds,
                              const DiagnosticsRecord* previous = nullptr);

}  // namespace ksns
