#pragma once

#include <functional>

#include "ksns/grid.hpp"

namespace ksns {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Mat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a21 = 0.0;
    double a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    /// Largest singular value.
    double norm() const;
    bool operator==(const Mat2&) const = default;
};

enum class SensitivityForm {
    ScalarIdentity,  ///< S = s(n) I
    Rotation,        ///< S = s(n) R(angle)
    Custom,          ///< user map of (x, n, c), saturated to the bound s(n)
};

enum class SpatialCutoff { Identity, MollifiedIndicator };
enum class AmplitudeCutoff { Identity, SmoothCap };

/// Tensor-valued chemotactic sensitivity with saturation s(n) = C_S (1 + n)^(-alpha)
/// and its regularization S_eps = rho(x) chi(n) S.
struct SensitivitySpec {
    double c_s = 1.0;
    double alpha = 0.0;
    SensitivityForm form = SensitivityForm::ScalarIdentity;
    double rotation_angle = 0.0;
    std::function<Mat2(Point, double, double)> custom;

    SpatialCutoff rho = SpatialCutoff::Identity;
    /// Width of the boundary layer over which rho rises from 0 to 1.
    double rho_margin = 0.05;
    AmplitudeCutoff chi = AmplitudeCutoff::Identity;
    /// chi(n) = 1 for n <= 1/eps_reg and vanishes for n >= 2/eps_reg; eps_reg = 0 disables.
    double eps_reg = 0.0;

    void validate() const;

    /// C_S (1 + n)^(-alpha)
    double saturation(double n) const;
    double amplitude_cutoff(double n) const;
};

/// C-infinity step: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);

/// Distance from x to the nearest boundary face of the masked domain.
double distance_to_boundary(const Grid& grid, Point x);

/// rho(x) for the configured spatial cutoff (1 for Identity).
double spatial_cutoff(const SensitivitySpec& spec, const Grid* domain, Point x);

/// S(x, n, c), or S_eps when regularized. `domain` is needed only for the mollified
/// spatial cutoff. Throws DomainError for negative n or c.
Mat2 eval_sensitivity(const SensitivitySpec& spec, Point x, double n, double c, bool regularized,
                      const Grid* domain = nullptr);

}  // namespace ksns
