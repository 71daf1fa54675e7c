#include "ksns/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksns/errors.hpp"

namespace ksns {

double Mat2::norm() const {
    // Half-sum of the conformal and anti-conformal parts; free of cancellation.
    return 0.5 * (std::hypot(a11 + a22, a21 - a12) + std::hypot(a11 - a22, a21 + a12));
}

void SensitivitySpec::validate() const {
    if (!(c_s > 0.0) || !std::isfinite(c_s)) throw InvalidParameter("C_S must be positive");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidParameter("alpha must be >= 0");
    if (form == SensitivityForm::Custom && !custom) {
        throw InvalidParameter("custom sensitivity form needs a map");
    }
    if (rho == SpatialCutoff::MollifiedIndicator && !(rho_margin > 0.0)) {
        throw InvalidParameter("mollified spatial cutoff needs a positive margin");
    }
    if (!(eps_reg >= 0.0) || !std::isfinite(eps_reg)) {
        throw InvalidParameter("eps_reg must be >= 0");
    }
}

double SensitivitySpec::saturation(double n) const {
    return alpha == 0.0 ? c_s : c_s * std::pow(1.0 + n, -alpha);
}

double SensitivitySpec::amplitude_cutoff(double n) const {
    if (chi == AmplitudeCutoff::Identity || eps_reg == 0.0) return 1.0;
    return 1.0 - smooth_step(n * eps_reg - 1.0);
}

double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double distance_to_boundary(const Grid& grid, Point x) {
    double best = std::numeric_limits<double>::infinity();
    auto segment = [&](double x0, double y0, double x1, double y1) {
        const double dx = x1 - x0;
        const double dy = y1 - y0;
        const double len2 = dx * dx + dy * dy;
        const double t = std::clamp(((x.x - x0) * dx + (x.y - y0) * dy) / len2, 0.0, 1.0);
        best = std::min(best, std::hypot(x.x - (x0 + t * dx), x.y - (y0 + t * dy)));
    };
    const double hx = grid.hx();
    const double hy = grid.hy();
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const std::size_t k = grid.index(i, j);
            if (!grid.inside(k)) continue;
            const std::uint8_t b = grid.neighbors(k);
            const double xl = i * hx;
            const double yl = j * hy;
            if (!(b & kEast)) segment(xl + hx, yl, xl + hx, yl + hy);
            if (!(b & kWest)) segment(xl, yl, xl, yl + hy);
            if (!(b & kNorth)) segment(xl, yl + hy, xl + hx, yl + hy);
            if (!(b & kSouth)) segment(xl, yl, xl + hx, yl);
        }
    }
    return best;
}

double spatial_cutoff(const SensitivitySpec& spec, const Grid* domain, Point x) {
    if (spec.rho == SpatialCutoff::Identity) return 1.0;
    if (domain == nullptr) {
        throw InvalidParameter("mollified spatial cutoff needs the domain");
    }
    return smooth_step(distance_to_boundary(*domain, x) / spec.rho_margin);
}

Mat2 eval_sensitivity(const SensitivitySpec& spec, Point x, double n, double c, bool regularized,
                      const Grid* domain) {
    if (!(n >= 0.0) || !(c >= 0.0)) {
        throw DomainError("sensitivity evaluated at negative density or signal");
    }
    const double bound = spec.saturation(n);
    Mat2 s;
    switch (spec.form) {
        case SensitivityForm::ScalarIdentity:
            s = Mat2::identity() * bound;
            break;
        case SensitivityForm::Rotation: {
            const double co = std::cos(spec.rotation_angle);
            const double si = std::sin(spec.rotation_angle);
            s = Mat2{co, -si, si, co} * bound;
            break;
        }
        case SensitivityForm::Custom: {
            s = spec.custom(x, n, c);
            const double norm = s.norm();
            if (norm > bound) s = s * (bound / norm);
            break;
        }
    }
    if (!regularized) return s;
    const double factor = spatial_cutoff(spec, domain, x) * spec.amplitude_cutoff(n);
    return factor == 1.0 ? s : s * factor;
}

}  // namespace ksns
