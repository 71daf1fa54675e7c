#include "ksns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksns/errors.hpp"
#include "ksns/operators.hpp"

namespace ksns {

const std::array<std::string_view, DiagnosticsRecord::kColumns>& DiagnosticsRecord::column_names() {
    static const std::array<std::string_view, kColumns> names = {
        "t",       "mass_n",     "mass_c",    "norm_n_1pa",   "grad_c_sq", "energy", "sup_n",
        "sup_grad_c", "kinetic", "enstrophy", "div_residual", "min_n",     "min_c"};
    return names;
}

std::array<double, DiagnosticsRecord::kColumns> DiagnosticsRecord::values() const {
    return {t,       mass_n,    mass_c,       norm_n_1pa, grad_c_sq, energy, sup_n,
            sup_grad_c, kinetic, enstrophy, div_residual, min_n,     min_c};
}

DiagnosticsRecord DiagnosticsRecord::from_values(const std::array<double, kColumns>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12]};
}

namespace {

// -<f, L f> in the cell inner product: the discrete Dirichlet energy of f.
double dirichlet_form(const ScalarField& f, BcKind bc) {
    const Grid& g = f.grid();
    std::vector<double> lf(g.size());
    kernels::laplacian(g, bc, f.values(), lf);
    return std::max(0.0, -kernels::dot(g, f.values(), lf) * g.cell_area());
}

void require_finite(const ScalarField& f, const char* name) {
    if (!f.all_finite()) throw NumericalBreakdown(name);
}

}  // namespace

DiagnosticsRecord compute_record(const SimState& state, double alpha) {
    if (!(alpha >= 0.0)) throw InvalidParameter("alpha must be >= 0");
    require_finite(state.n, "n");
    require_finite(state.c, "c");
    require_finite(state.u.x(), "u1");
    require_finite(state.u.y(), "u2");
    const Grid& g = state.grid();

    DiagnosticsRecord r;
    r.t = state.t;
    r.mass_n = integrate(state.n);
    r.mass_c = integrate(state.c);
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.inside(k)) s += std::pow(std::abs(state.n[k]), 1.0 + alpha);
    }
    r.norm_n_1pa = s * g.cell_area();
    r.grad_c_sq = dirichlet_form(state.c, BcKind::Neumann);
    r.energy = r.norm_n_1pa + r.grad_c_sq;
    r.sup_n = lp_norm(state.n, kInfNorm);

    std::vector<double> gx(g.size());
    std::vector<double> gy(g.size());
    kernels::gradient(g, BoundaryCondition::neumann(), state.c.values(), gx, gy);
    double sup_grad = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.inside(k)) sup_grad = std::max(sup_grad, std::hypot(gx[k], gy[k]));
    }
    r.sup_grad_c = sup_grad;

    r.kinetic = 0.5 * inner(state.u, state.u);
    r.enstrophy = dirichlet_form(state.u.x(), BcKind::Dirichlet) +
                  dirichlet_form(state.u.y(), BcKind::Dirichlet);
    r.div_residual = lp_norm(divergence(state.u), 2.0);
    r.min_n = state.n.min();
    r.min_c = state.c.min();
    return r;
}

namespace {

double uniform_spacing(const std::vector<double>& t, const char* what) {
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0)) throw InvalidInput(std::string(what) + ": times must increase");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) {
            throw InvalidInput(std::string(what) + ": samples must be uniformly spaced");
        }
    }
    return dt;
}

void validate(const GronwallInput& in) {
    if (in.t.empty()) throw InvalidInput("Gronwall input is empty");
    if (in.y.size() != in.t.size() || in.h.size() != in.t.size()) {
        throw InvalidInput("Gronwall series have different lengths");
    }
    if (in.t.size() < 2) throw InvalidInput("Gronwall input needs at least two samples");
    if (!(in.a > 0.0)) throw InvalidInput("Gronwall constant A must be positive");
    if (!(in.sigma > 0.0)) throw InvalidInput("Gronwall window sigma must be positive");
    uniform_spacing(in.t, "Gronwall input");
    if (in.sigma > (in.t.back() - in.t.front()) * (1 + 1e-12)) {
        throw InvalidInput("Gronwall window sigma exceeds the sampled span");
    }
    for (std::size_t i = 0; i < in.t.size(); ++i) {
        if (!(in.y[i] >= 0.0) || !(in.h[i] >= 0.0)) {
            throw InvalidInput("Gronwall series must be finite and non-negative");
        }
        if (!std::isfinite(in.y[i]) || !std::isfinite(in.h[i])) {
            throw InvalidInput("Gronwall series must be finite and non-negative");
        }
    }
}

}  // namespace

double gronwall_window_sup(const GronwallInput& in) {
    validate(in);
    const std::size_t m = in.t.size();
    const double dt = uniform_spacing(in.t, "Gronwall input");
    std::vector<double> cum(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) cum[i] = cum[i - 1] + 0.5 * dt * (in.h[i - 1] + in.h[i]);
    // Integral of the piecewise-linear interpolant from t0 to t0 + s.
    auto primitive = [&](double s) {
        const double pos = std::clamp(s / dt, 0.0, static_cast<double>(m - 1));
        std::size_t i = std::min(static_cast<std::size_t>(pos), m - 2);
        const double r = (pos - static_cast<double>(i)) * dt;
        return cum[i] + r * in.h[i] + 0.5 * r * r / dt * (in.h[i + 1] - in.h[i]);
    };
    const double span = in.t.back() - in.t.front();
    const double sigma = std::min(in.sigma, span);
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double s = static_cast<double>(i) * dt;
        if (s + sigma <= span * (1 + 1e-12)) best = std::max(best, primitive(s + sigma) - cum[i]);
        if (s - sigma >= -1e-12 * span) best = std::max(best, cum[i] - primitive(s - sigma));
    }
    return best;
}

double gronwall_bound(const GronwallInput& input, double tau) {
    if (!(tau > 0.0)) throw InvalidInput("Gronwall tau must be positive");
    const double b = gronwall_window_sup(input);
    return std::max(input.y.front() + b, b / (input.a * tau) + 2.0 * b);
}

double gronwall_bound(const GronwallInput& input) { return gronwall_bound(input, input.sigma); }

GronwallVerdict check_gronwall(const GronwallInput& input, double tau, double rel_tol) {
    GronwallVerdict v;
    v.bound = gronwall_bound(input, tau);
    v.window_sup = gronwall_window_sup(input);
    const double limit = v.bound + rel_tol * std::max(1.0, v.bound);
    for (std::size_t i = 0; i < input.y.size(); ++i) {
        if (input.y[i] > limit) {
            v.holds = false;
            v.index = i;
            v.violation_time = input.t[i];
            break;
        }
    }
    return v;
}

EnergyReport energy_inequality_monitor(const std::vector<DiagnosticsRecord>& records) {
    if (records.size() < 3) throw InvalidInput("energy monitor needs at least three records");
    std::vector<double> t(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        t[i] = records[i].t;
        if (!std::isfinite(records[i].energy) || !std::isfinite(records[i].enstrophy)) {
            throw InvalidInput("energy monitor: non-finite record");
        }
    }
    const double dt = uniform_spacing(t, "energy monitor");
    const std::size_t m = records.size();

    EnergyReport rep;
    rep.samples = m;
    rep.de_dt.resize(m);
    rep.de_dt[0] = (records[1].energy - records[0].energy) / dt;
    rep.de_dt[m - 1] = (records[m - 1].energy - records[m - 2].energy) / dt;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        rep.de_dt[i] = (records[i + 1].energy - records[i - 1].energy) / (2.0 * dt);
    }
    std::vector<double> x(m);
    double x_mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = records[i].enstrophy * records[i].energy;
        x_mean += x[i] / static_cast<double>(m);
    }
    auto offset = [&](double a) {
        double b = 0.0;
        for (std::size_t i = 0; i < m; ++i) b = std::max(b, rep.de_dt[i] - a * x[i]);
        return b;
    };
    // The mean fitted right-hand side is convex in C_a and increasing beyond a_max, so a
    // golden-section search on [0, a_max] finds the minimizer. a_max can exceed the
    // minimizer by many orders of magnitude, hence the fixed iteration count.
    double a_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (x[i] > 0.0 && rep.de_dt[i] > 0.0) a_max = std::max(a_max, rep.de_dt[i] / x[i]);
    }
    double a = 0.0;
    if (a_max > 0.0 && x_mean > 0.0) {
        auto cost = [&](double s) { return offset(s) + s * x_mean; };
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = 0.0;
        double hi = a_max;
        double c1 = hi - phi * (hi - lo);
        double c2 = lo + phi * (hi - lo);
        double f1 = cost(c1);
        double f2 = cost(c2);
        for (int it = 0; it < 400 && c1 < c2; ++it) {
            if (f1 <= f2) {
                hi = c2;
                c2 = c1;
                f2 = f1;
                c1 = hi - phi * (hi - lo);
                f1 = cost(c1);
            } else {
                lo = c1;
                c1 = c2;
                f1 = f2;
                c2 = lo + phi * (hi - lo);
                f2 = cost(c2);
            }
        }
        a = 0.5 * (lo + hi);
        for (double cand : {0.0, a_max}) {
            if (cost(cand) <= cost(a)) a = cand;
        }
    }
    rep.c_a = a;
    rep.c_b = offset(a);

    std::size_t ok_all = 0;
    std::size_t ok_interior = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double rhs = rep.c_a * x[i] + rep.c_b;
        const bool ok = rep.de_dt[i] <= rhs + 1e-12 * (std::abs(rhs) + std::abs(rep.de_dt[i]));
        ok_all += ok;
        if (i > 0 && i + 1 < m) ok_interior += ok;
    }
    rep.fraction_all = static_cast<double>(ok_all) / static_cast<double>(m);
    rep.fraction_interior = static_cast<double>(ok_interior) / static_cast<double>(m - 2);
    return rep;
}

void BlowupThresholds::validate() const {
    if (!(sup_n_max > 0.0) || !(sup_grad_c_max > 0.0) || !(growth_ratio_max > 1.0) ||
        !(growth_floor > 0.0)) {
        throw InvalidParameter("blow-up thresholds must be positive (growth ratio > 1)");
    }
}

BlowupVerdict blowup_detector(const DiagnosticsRecord& record, const BlowupThresholds& thresholds,
                              const DiagnosticsRecord* previous) {
    thresholds.validate();
    if (!std::isfinite(record.sup_n) || !std::isfinite(record.sup_grad_c)) {
        return BlowupVerdict::SuspectedBlowup;
    }
    if (record.sup_n > thresholds.sup_n_max || record.sup_grad_c > thresholds.sup_grad_c_max) {
        return BlowupVerdict::SuspectedBlowup;
    }
    if (previous && previous->sup_n >= thresholds.growth_floor &&
        record.sup_n > thresholds.growth_ratio_max * previous->sup_n) {
        return BlowupVerdict::SuspectedBlowup;
    }
    return BlowupVerdict::Ok;
}

}  // namespace ksns
