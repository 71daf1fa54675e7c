#pragma once

#include <string>

#include "ksns/chemotaxis.hpp"
#include "ksns/diagnostics.hpp"
#include "ksns/elliptic.hpp"
#include "ksns/fluid.hpp"

namespace ksns {

enum class DomainShape { Rectangle, LShape };
enum class PotentialKind { Constant, Linear, Tabulated };
enum class InitialKind { Uniform, Gaussian, File };

struct GridSpec {
    DomainShape shape = DomainShape::Rectangle;
    int nx = 64;
    int ny = 64;
    double lx = 1.0;
    double ly = 1.0;

    bool operator==(const GridSpec&) const = default;
};

struct PhysicsSpec {
    double alpha = 0.5;
    double c_s = 1.0;
    double kappa = 1.0;
    /// Shared by the Yosida smoothing and the amplitude cap.
    double eps_reg = 1e-3;
    SensitivityForm sensitivity = SensitivityForm::ScalarIdentity;
    double rotation_angle = 0.0;
    AmplitudeCutoff chi = AmplitudeCutoff::SmoothCap;
    SpatialCutoff rho = SpatialCutoff::Identity;
    double rho_margin = 0.05;
    bool regularized = true;
    YosidaOrder yosida_order = YosidaOrder::SolveThenProject;
    ConvectionScheme convection = ConvectionScheme::Upwind;

    bool operator==(const PhysicsSpec&) const = default;
};

/// phi = value (constant), a x + b y (linear) or read from a file of nx * ny numbers.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Linear;
    double value = 0.0;
    double a = 0.0;
    double b = 1.0;
    std::string file;

    bool operator==(const PotentialSpec&) const = default;
};

/// Synthetic initial-data families. Gaussian: n = n0 + mass-normalized bump of the given
/// width, c = c0. File: a field snapshot (n, c and u are taken from it).
struct InitialSpec {
    InitialKind kind = InitialKind::Gaussian;
    double n0 = 0.0;
    double c0 = 0.0;
    double center_x = 0.5;
    double center_y = 0.5;
    double width = 0.1;
    double mass = 5.0;
    std::string file;

    bool operator==(const InitialSpec&) const = default;
};

struct NumericsSpec {
    /// Fixed step, or the largest step when adaptive.
    double dt = 1e-3;
    bool adaptive = true;
    double t_end = 1.0;
    /// Fraction of the stability limits used by adaptive steps.
    double safety = 0.8;
    double dt_min = 1e-9;
    int max_rejections = 30;
    SolverMethod solver = SolverMethod::Auto;
    double solver_tol = 1e-10;
    double transport_tol = 1e-12;
    double projection_tol = 1e-10;
    double transport_cfl = 1.0;
    double fluid_cfl = 0.5;
    bool strang = false;

    bool operator==(const NumericsSpec&) const = default;
};

struct DetectorSpec {
    double sup_n_max = 1e8;
    /// Also flag sup_n above this multiple of the initial sup_n; zero disables.
    double sup_n_factor = 1e3;
    double sup_grad_c_max = 1e10;
    double growth_ratio = 1.5;
    double growth_floor = 1.0;

    bool operator==(const DetectorSpec&) const = default;
};

struct OutputSpec {
    /// Record spacing in time; zero records every step.
    double cadence = 0.01;
    /// Empty disables file output.
    std::string directory;
    /// Snapshot spacing; zero writes only the final snapshot.
    double snapshot_cadence = 0.0;
    std::string label = "run";

    bool operator==(const OutputSpec&) const = default;
};

struct SimConfig {
    GridSpec grid;
    PhysicsSpec physics;
    PotentialSpec potential;
    InitialSpec initial;
    NumericsSpec numerics;
    DetectorSpec detector;
    OutputSpec output;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool operator==(const SimConfig&) const = default;
};

/// Parses `[section]` headers and `key = value` lines; `#` starts a comment. Unknown
/// sections or keys and malformed values raise ConfigError with the field name.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
/// Every field, with doubles in shortest round-trip form.
std::string serialize_config(const SimConfig& config);

std::string to_string(SolverMethod m);
std::string to_string(DomainShape s);

}  // namespace ksns
