#include "ksns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "ksns/errors.hpp"

namespace ksns {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class E>
struct EnumTable {
    std::vector<std::pair<E, std::string>> entries;

    const std::string& name(E e) const {
        for (const auto& [v, n] : entries) {
            if (v == e) return n;
        }
        return entries.front().second;
    }
    E parse(const std::string& field, const std::string& s) const {
        std::string allowed;
        for (const auto& [v, n] : entries) {
            if (n == s) return v;
            allowed += (allowed.empty() ? "" : ", ") + n;
        }
        throw ConfigError(field, "unknown value '" + s + "' (expected one of " + allowed + ")");
    }
};

const EnumTable<DomainShape> kShapes{{{DomainShape::Rectangle, "rectangle"},
                                      {DomainShape::LShape, "l-shape"}}};
const EnumTable<SensitivityForm> kForms{{{SensitivityForm::ScalarIdentity, "scalar-identity"},
                                         {SensitivityForm::Rotation, "rotation"}}};
const EnumTable<AmplitudeCutoff> kChi{{{AmplitudeCutoff::SmoothCap, "smooth-cap"},
                                       {AmplitudeCutoff::Identity, "identity"}}};
const EnumTable<SpatialCutoff> kRho{{{SpatialCutoff::Identity, "identity"},
                                     {SpatialCutoff::MollifiedIndicator, "mollified"}}};
const EnumTable<YosidaOrder> kOrders{{{YosidaOrder::SolveThenProject, "solve-then-project"},
                                      {YosidaOrder::ProjectThenSolve, "project-then-solve"}}};
const EnumTable<ConvectionScheme> kSchemes{{{ConvectionScheme::Upwind, "upwind"},
                                            {ConvectionScheme::Central, "central"}}};
const EnumTable<PotentialKind> kPotentials{{{PotentialKind::Constant, "constant"},
                                            {PotentialKind::Linear, "linear"},
                                            {PotentialKind::Tabulated, "tabulated"}}};
const EnumTable<InitialKind> kInitials{{{InitialKind::Uniform, "uniform"},
                                        {InitialKind::Gaussian, "gaussian"},
                                        {InitialKind::File, "file"}}};
const EnumTable<SolverMethod> kMethods{{{SolverMethod::Auto, "auto"},
                                        {SolverMethod::ConjugateGradient, "cg"},
                                        {SolverMethod::MultigridPCG, "mg"},
                                        {SolverMethod::FastDiagonalizationPCG, "fdm"}}};
const EnumTable<bool> kBools{{{true, "true"}, {false, "false"}}};

// One binding per config key: how to read it from text and how to write it back.
struct Binding {
    std::string key;  // "section.name"
    std::function<void(SimConfig&, const std::string&)> read;
    std::function<std::string(const SimConfig&)> write;
};

double parse_double(const std::string& field, const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(field, "expected a number, got '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& field, const std::string& s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(field, "expected an integer, got '" + s + "'");
    }
    return v;
}

template <class M>
Binding real(const std::string& key, M member) {
    return {key, [=](SimConfig& c, const std::string& s) { member(c) = parse_double(key, s); },
            [=](const SimConfig& c) { return format_double(member(c)); }};
}

template <class M>
Binding integer(const std::string& key, M member) {
    return {key, [=](SimConfig& c, const std::string& s) { member(c) = parse_int(key, s); },
            [=](const SimConfig& c) { return std::to_string(member(c)); }};
}

template <class M>
Binding text(const std::string& key, M member) {
    return {key, [=](SimConfig& c, const std::string& s) { member(c) = s; },
            [=](const SimConfig& c) { return member(c); }};
}

template <class E, class M>
Binding choice(const std::string& key, const EnumTable<E>& table, M member) {
    return {key, [=, &table](SimConfig& c, const std::string& s) { member(c) = table.parse(key, s); },
            [=, &table](const SimConfig& c) {
                return table.name(member(c));
            }};
}

#define KSNS_FIELD(path) [](auto& c) -> auto& { return c.path; }

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> all = {
        choice("grid.shape", kShapes, KSNS_FIELD(grid.shape)),
        integer("grid.nx", KSNS_FIELD(grid.nx)),
        integer("grid.ny", KSNS_FIELD(grid.ny)),
        real("grid.lx", KSNS_FIELD(grid.lx)),
        real("grid.ly", KSNS_FIELD(grid.ly)),

        real("physics.alpha", KSNS_FIELD(physics.alpha)),
        real("physics.c_s", KSNS_FIELD(physics.c_s)),
        real("physics.kappa", KSNS_FIELD(physics.kappa)),
        real("physics.eps_reg", KSNS_FIELD(physics.eps_reg)),
        choice("physics.sensitivity", kForms, KSNS_FIELD(physics.sensitivity)),
        real("physics.rotation_angle", KSNS_FIELD(physics.rotation_angle)),
        choice("physics.chi", kChi, KSNS_FIELD(physics.chi)),
        choice("physics.rho", kRho, KSNS_FIELD(physics.rho)),
        real("physics.rho_margin", KSNS_FIELD(physics.rho_margin)),
        choice("physics.regularized", kBools, KSNS_FIELD(physics.regularized)),
        choice("physics.yosida_order", kOrders, KSNS_FIELD(physics.yosida_order)),
        choice("physics.convection", kSchemes, KSNS_FIELD(physics.convection)),

        choice("potential.kind", kPotentials, KSNS_FIELD(potential.kind)),
        real("potential.value", KSNS_FIELD(potential.value)),
        real("potential.a", KSNS_FIELD(potential.a)),
        real("potential.b", KSNS_FIELD(potential.b)),
        text("potential.file", KSNS_FIELD(potential.file)),

        choice("initial.kind", kInitials, KSNS_FIELD(initial.kind)),
        real("initial.n0", KSNS_FIELD(initial.n0)),
        real("initial.c0", KSNS_FIELD(initial.c0)),
        real("initial.center_x", KSNS_FIELD(initial.center_x)),
        real("initial.center_y", KSNS_FIELD(initial.center_y)),
        real("initial.width", KSNS_FIELD(initial.width)),
        real("initial.mass", KSNS_FIELD(initial.mass)),
        text("initial.file", KSNS_FIELD(initial.file)),

        real("numerics.dt", KSNS_FIELD(numerics.dt)),
        choice("numerics.adaptive", kBools, KSNS_FIELD(numerics.adaptive)),
        real("numerics.t_end", KSNS_FIELD(numerics.t_end)),
        real("numerics.safety", KSNS_FIELD(numerics.safety)),
        real("numerics.dt_min", KSNS_FIELD(numerics.dt_min)),
        integer("numerics.max_rejections", KSNS_FIELD(numerics.max_rejections)),
        choice("numerics.solver", kMethods, KSNS_FIELD(numerics.solver)),
        real("numerics.solver_tol", KSNS_FIELD(numerics.solver_tol)),
        real("numerics.transport_tol", KSNS_FIELD(numerics.transport_tol)),
        real("numerics.projection_tol", KSNS_FIELD(numerics.projection_tol)),
        real("numerics.transport_cfl", KSNS_FIELD(numerics.transport_cfl)),
        real("numerics.fluid_cfl", KSNS_FIELD(numerics.fluid_cfl)),
        choice("numerics.strang", kBools, KSNS_FIELD(numerics.strang)),

        real("detector.sup_n_max", KSNS_FIELD(detector.sup_n_max)),
        real("detector.sup_n_factor", KSNS_FIELD(detector.sup_n_factor)),
        real("detector.sup_grad_c_max", KSNS_FIELD(detector.sup_grad_c_max)),
        real("detector.growth_ratio", KSNS_FIELD(detector.growth_ratio)),
        real("detector.growth_floor", KSNS_FIELD(detector.growth_floor)),

        real("output.cadence", KSNS_FIELD(output.cadence)),
        text("output.directory", KSNS_FIELD(output.directory)),
        real("output.snapshot_cadence", KSNS_FIELD(output.snapshot_cadence)),
        text("output.label", KSNS_FIELD(output.label)),
    };
    return all;
}

#undef KSNS_FIELD

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void SimConfig::validate() const {
    require(grid.nx >= 4 && grid.ny >= 4, "grid.nx", "grid needs at least 4 cells per direction");
    require(grid.shape != DomainShape::LShape || (grid.nx % 2 == 0 && grid.ny % 2 == 0),
            "grid.shape", "l-shape needs even nx and ny");
    require(finite_positive(grid.lx), "grid.lx", "must be positive");
    require(finite_positive(grid.ly), "grid.ly", "must be positive");

    require(std::isfinite(physics.alpha) && physics.alpha >= 0.0, "physics.alpha", "must be >= 0");
    require(finite_positive(physics.c_s), "physics.c_s", "must be positive");
    require(std::isfinite(physics.kappa), "physics.kappa", "must be finite");
    require(std::isfinite(physics.eps_reg) && physics.eps_reg >= 0.0, "physics.eps_reg",
            "must be >= 0");
    require(std::isfinite(physics.rotation_angle), "physics.rotation_angle", "must be finite");
    require(finite_positive(physics.rho_margin), "physics.rho_margin", "must be positive");

    require(std::isfinite(potential.value) && std::isfinite(potential.a) &&
                std::isfinite(potential.b),
            "potential", "coefficients must be finite");
    require(potential.kind != PotentialKind::Tabulated || !potential.file.empty(),
            "potential.file", "tabulated potential needs a file");

    require(std::isfinite(initial.n0) && initial.n0 >= 0.0, "initial.n0", "must be >= 0");
    require(std::isfinite(initial.c0) && initial.c0 >= 0.0, "initial.c0", "must be >= 0");
    if (initial.kind == InitialKind::Gaussian) {
        require(std::isfinite(initial.mass) && initial.mass >= 0.0, "initial.mass", "must be >= 0");
        require(finite_positive(initial.width), "initial.width", "must be positive");
        require(std::isfinite(initial.center_x) && std::isfinite(initial.center_y),
                "initial.center_x", "must be finite");
    }
    require(initial.kind != InitialKind::File || !initial.file.empty(), "initial.file",
            "file initial data needs a path");

    require(finite_positive(numerics.dt), "numerics.dt", "must be positive");
    require(std::isfinite(numerics.t_end) && numerics.t_end > numerics.dt, "numerics.t_end",
            "must exceed dt");
    require(numerics.safety > 0.0 && numerics.safety <= 1.0, "numerics.safety",
            "must lie in (0, 1]");
    require(finite_positive(numerics.dt_min) && numerics.dt_min <= numerics.dt,
            "numerics.dt_min", "must lie in (0, dt]");
    require(numerics.max_rejections >= 0, "numerics.max_rejections", "must be >= 0");
    require(numerics.solver_tol > 0.0 && numerics.solver_tol < 1.0, "numerics.solver_tol",
            "must lie in (0, 1)");
    require(numerics.transport_tol > 0.0 && numerics.transport_tol < 1.0,
            "numerics.transport_tol", "must lie in (0, 1)");
    require(numerics.projection_tol > 0.0 && numerics.projection_tol < 1.0,
            "numerics.projection_tol", "must lie in (0, 1)");
    require(numerics.transport_cfl > 0.0 && numerics.transport_cfl <= 1.0,
            "numerics.transport_cfl", "must lie in (0, 1]");
    require(numerics.fluid_cfl > 0.0 && numerics.fluid_cfl <= 1.0, "numerics.fluid_cfl",
            "must lie in (0, 1]");

    require(finite_positive(detector.sup_n_max), "detector.sup_n_max", "must be positive");
    require(std::isfinite(detector.sup_n_factor) && detector.sup_n_factor >= 0.0,
            "detector.sup_n_factor", "must be >= 0");
    require(finite_positive(detector.sup_grad_c_max), "detector.sup_grad_c_max",
            "must be positive");
    require(std::isfinite(detector.growth_ratio) && detector.growth_ratio > 1.0,
            "detector.growth_ratio", "must exceed 1");
    require(finite_positive(detector.growth_floor), "detector.growth_floor", "must be positive");

    require(std::isfinite(output.cadence) && output.cadence >= 0.0, "output.cadence",
            "must be >= 0");
    require(std::isfinite(output.snapshot_cadence) && output.snapshot_cadence >= 0.0,
            "output.snapshot_cadence", "must be >= 0");
}

SimConfig parse_config(const std::string& source) {
    std::map<std::string, const Binding*> index;
    for (const Binding& b : bindings()) index[b.key] = &b;

    SimConfig cfg;
    std::istringstream in(source);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno), "malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        const auto it = index.find(key);
        if (it == index.end()) throw ConfigError(key, "unknown key");
        it->second->read(cfg, trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("path", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& config) {
    std::string out;
    std::string section;
    for (const Binding& b : bindings()) {
        const auto dot = b.key.find('.');
        const std::string sec = b.key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out += "\n";
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += b.key.substr(dot + 1) + " = " + b.write(config) + "\n";
    }
    return out;
}

std::string to_string(SolverMethod m) { return kMethods.name(m); }
std::string to_string(DomainShape s) { return kShapes.name(s); }

}  // namespace ksns
