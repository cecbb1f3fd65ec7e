#include "plantflow/config.hpp"

#include "plantflow/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace plantflow {

using nlohmann::json;

namespace {

const char* const kSideNames[] = {"a", "s"};
const char* const kClassNames[] = {"z", "as"};

// ------------------------------------------------------------ validation

const std::vector<ValidationRule> kRules = {
    {"permeability-elliptic", "K_a and K_sp are symmetric and uniformly elliptic"},
    {"membrane-nonzero", "kappa_i != 0 and delta_i != 0 on both membrane classes"},
    {"diffusion-elliptic", "D_a and D_s are symmetric and uniformly elliptic"},
    {"production-lipschitz",
     "F_l is Lipschitz and sublinear with F_l(xi_-) xi_- <= C |xi_-|^2 (logistic rate >= 0, capacity > 0)"},
    {"regulation-nonnegative", "R_l is uniformly Lipschitz and non-negative for non-negative arguments"},
    {"rates-nonnegative", "alpha_l, beta_l and gamma_{j,l} are non-negative (k1..k4, gammas, density)"},
    {"initial-nonnegative", "c0_l given by smooth closed-form expressions and c0_l, theta0 are non-negative"},
    {"boundary-divergence-free", "v_D = V_D . n with div V_D = 0, hence the integral of v_D over the boundary is 0"},
    {"geometry", "unit cell and macroscopic domain are well formed (artifact)"},
    {"solver-settings", "positive mesh sizes, time step, cadence and viscosity (artifact)"},
};

const ValidationRule& rule(const std::string& id) {
    for (const auto& r : kRules)
        if (r.id == id) return r;
    throw StateError("unknown validation rule " + id);
}

[[noreturn]] void violated(const std::string& id, const std::string& detail) {
    throw ValidationError("[" + id + "] " + detail + " (assumption: " + rule(id).assumption + ")");
}

bool symmetric_elliptic(const Mat2& a) {
    if (!a.allFinite() || std::abs(a(0, 1) - a(1, 0)) > 1e-12 * std::max(1.0, a.norm())) return false;
    Eigen::SelfAdjointEigenSolver<Mat2> es(a);
    return es.eigenvalues().minCoeff() > 0.0;
}

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

// --------------------------------------------------------------- parsing

std::string location(const std::string& text, std::size_t offset) {
    int line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        const std::string key = path.substr(path.find_last_of('.') + 1);
        const std::size_t at = text_.find("\"" + key + "\"");
        throw ParseError("config " + (at == std::string::npos ? std::string("") : location(text_, at) + ": ") +
                         path + ": " + what);
    }

    void keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) fail(path, "expected an object");
        for (const auto& [k, v] : j.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) fail(path.empty() ? k : path + "." + k, "unknown key");
        }
    }

    void number(const json& j, const char* key, const std::string& path, double& out) const {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number()) fail(join(path, key), "expected a number");
        out = v.get<double>();
    }
    void integer(const json& j, const char* key, const std::string& path, int& out) const {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
        out = v.get<int>();
    }
    void boolean(const json& j, const char* key, const std::string& path, bool& out) const {
        if (!j.contains(key)) return;
        if (!j.at(key).is_boolean()) fail(join(path, key), "expected true or false");
        out = j.at(key).get<bool>();
    }
    void string(const json& j, const char* key, const std::string& path, std::string& out) const {
        if (!j.contains(key)) return;
        if (!j.at(key).is_string()) fail(join(path, key), "expected a string");
        out = j.at(key).get<std::string>();
    }
    /// Scalar s (meaning s·I) or [[a, b], [c, d]].
    void tensor(const json& j, const char* key, const std::string& path, Mat2& out) const {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (v.is_number()) {
            out = v.get<double>() * Mat2::Identity();
            return;
        }
        if (!v.is_array() || v.size() != 2) fail(join(path, key), "expected a number or a 2x2 array");
        for (int r = 0; r < 2; ++r) {
            if (!v[r].is_array() || v[r].size() != 2) fail(join(path, key), "expected a 2x2 array");
            for (int c = 0; c < 2; ++c) {
                if (!v[r][c].is_number()) fail(join(path, key), "expected numeric entries");
                out(r, c) = v[r][c].get<double>();
            }
        }
    }
    /// Expression given as a string or a number.
    void field(const json& j, const char* key, const std::string& path, std::string& out) const {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (v.is_number()) {
            std::ostringstream s;
            s.precision(17);
            s << v.get<double>();
            out = s.str();
        } else if (v.is_string()) {
            out = v.get<std::string>();
        } else {
            fail(join(path, key), "expected an expression string or a number");
        }
        try {
            Expression e(out);
        } catch (const ParseError& err) {
            fail(join(path, key), err.what());
        }
    }

    static std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

private:
    const std::string& text_;
};

void read_cell(const Reader& r, const json& j, UnitCellSpec& cell) {
    const std::string p = "geometry.cell";
    r.keys(j, p, {"shape", "radius", "corner_radius", "wall_thickness", "plasmodesmata"});
    if (j.contains("shape")) {
        std::string name;
        r.string(j, "shape", p, name);
        try {
            cell.shape = parse_shape(name);
        } catch (const Error& e) {
            r.fail(p + ".shape", e.what());
        }
    }
    r.number(j, "radius", p, cell.radius);
    r.number(j, "corner_radius", p, cell.corner_radius);
    r.number(j, "wall_thickness", p, cell.wall_thickness);
    if (j.contains("plasmodesmata")) {
        const json& list = j.at("plasmodesmata");
        if (!list.is_array()) r.fail(p + ".plasmodesmata", "expected an array");
        cell.plasmodesmata.clear();
        for (const json& item : list) {
            const std::string q = p + ".plasmodesmata";
            r.keys(item, q, {"side", "width"});
            Plasmodesma pd;
            std::string side = "right";
            r.string(item, "side", q, side);
            try {
                pd.side = parse_side(side);
            } catch (const Error& e) {
                r.fail(q + ".side", e.what());
            }
            r.number(item, "width", q, pd.width);
            cell.plasmodesmata.push_back(pd);
        }
    }
}

void read_domain(const Reader& r, const json& j, MacroDomainSpec& d) {
    const std::string p = "geometry.domain";
    r.keys(j, p, {"x0", "y0", "x1", "y1", "h", "v_d"});
    r.number(j, "x0", p, d.x0);
    r.number(j, "y0", p, d.y0);
    r.number(j, "x1", p, d.x1);
    r.number(j, "y1", p, d.y1);
    r.number(j, "h", p, d.h);
    double v[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < d.segments.size() && k < 4; ++k) v[k] = d.segments[k].v_d;
    if (j.contains("v_d")) {
        const json& vd = j.at("v_d");
        r.keys(vd, p + ".v_d", {"left", "right", "bottom", "top"});
        r.number(vd, "left", p + ".v_d", v[0]);
        r.number(vd, "right", p + ".v_d", v[1]);
        r.number(vd, "bottom", p + ".v_d", v[2]);
        r.number(vd, "top", p + ".v_d", v[3]);
    }
    d = MacroDomainSpec::rectangle(d.x0, d.y0, d.x1, d.y1, d.h, v[0], v[1], v[2], v[3]);
}

void read_membrane(const Reader& r, const json& j, const std::string& p, MembraneCoefficients& m) {
    r.keys(j, p,
           {"reflection", "thickness", "solute_diffusion", "barodiffusion", "solvent_diffusion", "solvent_pressure",
            "density"});
    r.number(j, "reflection", p, m.reflection);
    r.number(j, "thickness", p, m.thickness);
    r.number(j, "solute_diffusion", p, m.solute_diffusion);
    r.number(j, "barodiffusion", p, m.barodiffusion);
    r.number(j, "solvent_diffusion", p, m.solvent_diffusion);
    r.number(j, "solvent_pressure", p, m.solvent_pressure);
    r.number(j, "density", p, m.density);
}

void read_transporter(const Reader& r, const json& j, const std::string& p, TransporterParams& t) {
    r.keys(j, p, {"k1", "k2", "k3", "k4", "gamma_free", "gamma_bound", "regulation"});
    r.number(j, "k1", p, t.k1);
    r.number(j, "k2", p, t.k2);
    r.number(j, "k3", p, t.k3);
    r.number(j, "k4", p, t.k4);
    r.number(j, "gamma_free", p, t.gamma_free);
    r.number(j, "gamma_bound", p, t.gamma_bound);
    if (j.contains("regulation")) {
        const json& g = j.at("regulation");
        r.keys(g, p + ".regulation", {"rate", "target"});
        r.number(g, "rate", p + ".regulation", t.regulation.rate);
        r.number(g, "target", p + ".regulation", t.regulation.target);
    }
}

void read_physics(const Reader& r, const json& j, RunConfig& c) {
    const std::string p = "physics";
    r.keys(j, p,
           {"viscosity", "K_aw", "K_ap", "K_sp", "membranes", "diffusion", "production", "cutoff", "density",
            "transporters", "initial"});
    r.number(j, "viscosity", p, c.viscosity);
    r.tensor(j, "K_aw", p, c.K_aw);
    r.tensor(j, "K_ap", p, c.K_ap);
    r.tensor(j, "K_sp", p, c.K_sp);
    r.number(j, "cutoff", p, c.cutoff);
    r.number(j, "density", p, c.density);
    if (j.contains("membranes")) {
        const json& m = j.at("membranes");
        r.keys(m, p + ".membranes", {"z", "as"});
        if (m.contains("z")) read_membrane(r, m.at("z"), p + ".membranes.z", c.membrane_z);
        if (m.contains("as")) read_membrane(r, m.at("as"), p + ".membranes.as", c.membrane_as);
    }
    if (j.contains("diffusion")) {
        const json& d = j.at("diffusion");
        const std::string q = p + ".diffusion";
        r.keys(d, q, {"aw", "ap", "z", "sp"});
        r.tensor(d, "aw", q, c.diffusion.aw);
        r.tensor(d, "ap", q, c.diffusion.ap);
        r.tensor(d, "z", q, c.diffusion.z);
        r.tensor(d, "sp", q, c.diffusion.sp);
    }
    if (j.contains("production")) {
        const json& f = j.at("production");
        const std::string q = p + ".production";
        r.keys(f, q, {"a", "s"});
        if (f.contains("a")) {
            r.keys(f.at("a"), q + ".a", {"rate", "capacity"});
            r.number(f.at("a"), "rate", q + ".a", c.growth_a);
            r.number(f.at("a"), "capacity", q + ".a", c.capacity_a);
        }
        if (f.contains("s")) {
            r.keys(f.at("s"), q + ".s", {"rate", "capacity"});
            r.number(f.at("s"), "rate", q + ".s", c.growth_s);
            r.number(f.at("s"), "capacity", q + ".s", c.capacity_s);
        }
    }
    if (j.contains("transporters")) {
        const json& t = j.at("transporters");
        r.keys(t, p + ".transporters", {"a", "s"});
        for (int l = 0; l < 2; ++l) {
            if (!t.contains(kSideNames[l])) continue;
            const json& side = t.at(kSideNames[l]);
            const std::string q = p + ".transporters." + kSideNames[l];
            r.keys(side, q, {"z", "as"});
            for (int k = 0; k < 2; ++k)
                if (side.contains(kClassNames[k]))
                    read_transporter(r, side.at(kClassNames[k]), q + "." + kClassNames[k], c.transporters[l][k]);
        }
    }
    if (j.contains("initial")) {
        const json& i = j.at("initial");
        const std::string q = p + ".initial";
        r.keys(i, q, {"c_a", "c_s", "theta"});
        r.field(i, "c_a", q, c.initial_c_a);
        r.field(i, "c_s", q, c.initial_c_s);
        if (i.contains("theta")) {
            const json& t = i.at("theta");
            r.keys(t, q + ".theta", {"a", "s"});
            for (int l = 0; l < 2; ++l) {
                if (!t.contains(kSideNames[l])) continue;
                const json& side = t.at(kSideNames[l]);
                const std::string s = q + ".theta." + kSideNames[l];
                r.keys(side, s, {"z", "as"});
                for (int k = 0; k < 2; ++k) {
                    if (!side.contains(kClassNames[k])) continue;
                    const json& th = side.at(kClassNames[k]);
                    r.keys(th, s + "." + kClassNames[k], {"free", "bound"});
                    r.number(th, "free", s + "." + kClassNames[k], c.initial_theta[l][k].free);
                    r.number(th, "bound", s + "." + kClassNames[k], c.initial_theta[l][k].bound);
                }
            }
        }
    }
}

void read_solver(const Reader& r, const json& j, RunConfig& c) {
    const std::string p = "solver";
    r.keys(j, p, {"cell_h", "macro", "verify"});
    r.number(j, "cell_h", p, c.cell_h);
    if (j.contains("macro")) {
        const json& m = j.at("macro");
        const std::string q = p + ".macro";
        r.keys(m, q, {"dt", "t_end", "output_every", "lattice", "refresh_every", "scheme"});
        r.number(m, "dt", q, c.macro.dt);
        r.number(m, "t_end", q, c.macro.t_end);
        r.integer(m, "output_every", q, c.macro.output_every);
        r.integer(m, "lattice", q, c.macro.lattice);
        r.integer(m, "refresh_every", q, c.macro.refresh_every);
        if (m.contains("scheme")) {
            std::string s;
            r.string(m, "scheme", q, s);
            if (s == "exponential") c.macro.scheme = TransporterScheme::Exponential;
            else if (s == "backward_euler") c.macro.scheme = TransporterScheme::BackwardEuler;
            else r.fail(q + ".scheme", "expected \"exponential\" or \"backward_euler\"");
        }
    }
    if (j.contains("verify")) {
        const json& v = j.at("verify");
        const std::string q = p + ".verify";
        r.keys(v, q, {"cells_per_side", "dc", "macro_cells"});
        if (v.contains("cells_per_side")) {
            const json& list = v.at("cells_per_side");
            if (!list.is_array()) r.fail(q + ".cells_per_side", "expected an array of integers");
            c.verify.cells_per_side.clear();
            for (const json& n : list) {
                if (!n.is_number_integer()) r.fail(q + ".cells_per_side", "expected an array of integers");
                c.verify.cells_per_side.push_back(n.get<int>());
            }
        }
        r.field(v, "dc", q, c.verify.dc);
        r.integer(v, "macro_cells", q, c.verify.macro_cells);
    }
}

}  // namespace

// --------------------------------------------------------------- RunConfig

CellFlowParams RunConfig::flow_params() const {
    CellFlowParams p;
    p.viscosity = viscosity;
    p.k_aw = K_aw;
    p.k_ap = K_ap;
    p.k_sp = K_sp;
    p.kappa_z = membrane_z.kappa();
    p.delta_z = membrane_z.delta();
    p.kappa_as = membrane_as.kappa();
    p.delta_as = membrane_as.delta();
    return p;
}

MacroPhysics RunConfig::macro_physics(const EffectiveCoefficients& c) const {
    MacroPhysics m;
    m.K = c.K;
    m.M = c.M;
    m.A_a = c.A_a;
    m.A_s = c.A_s;
    m.area_a = c.area_a;
    m.area_s = c.area_s;
    m.length_z = c.length_z;
    m.length_as = c.length_as;
    m.cutoff = cutoff;
    m.growth_a = growth_a;
    m.capacity_a = capacity_a;
    m.growth_s = growth_s;
    m.capacity_s = capacity_s;
    m.transporters = transporters;
    m.density = density;
    return m;
}

std::vector<double> RunConfig::boundary_velocities() const {
    std::vector<double> v;
    for (const auto& s : domain.segments) v.push_back(s.v_d);
    return v;
}

const std::vector<ValidationRule>& validation_rules() { return kRules; }

void validate_config(const RunConfig& c) {
    const std::pair<const char*, const Mat2*> perms[] = {{"K_aw", &c.K_aw}, {"K_ap", &c.K_ap}, {"K_sp", &c.K_sp}};
    for (const auto& [name, k] : perms)
        if (!symmetric_elliptic(*k)) violated("permeability-elliptic", std::string(name) + " is not symmetric positive definite");

    const std::pair<const char*, const MembraneCoefficients*> membranes[] = {{"z", &c.membrane_z},
                                                                             {"as", &c.membrane_as}};
    for (const auto& [name, m] : membranes) {
        try {
            m->validate();
        } catch (const Error& e) {
            violated("membrane-nonzero", std::string("membrane ") + name + ": " + e.what());
        }
        if (!(std::abs(m->kappa()) > 0.0) || !std::isfinite(m->kappa()))
            violated("membrane-nonzero", std::string("membrane ") + name + " has kappa = 0");
        if (!(std::abs(m->delta()) > 0.0) || !std::isfinite(m->delta()))
            violated("membrane-nonzero", std::string("membrane ") + name + " has delta = 0");
    }

    const std::pair<const char*, const Mat2*> diff[] = {{"aw", &c.diffusion.aw},
                                                        {"ap", &c.diffusion.ap},
                                                        {"z", &c.diffusion.z},
                                                        {"sp", &c.diffusion.sp}};
    for (const auto& [name, d] : diff)
        if (!symmetric_elliptic(*d))
            violated("diffusion-elliptic", std::string("diffusion.") + name + " is not symmetric positive definite");

    if (!finite_nonnegative(c.growth_a) || !finite_nonnegative(c.growth_s))
        violated("production-lipschitz", "production rates must be finite and non-negative");
    if (!(c.capacity_a > 0.0) || !(c.capacity_s > 0.0) || !std::isfinite(c.capacity_a) || !std::isfinite(c.capacity_s))
        violated("production-lipschitz", "production capacities must be finite and positive");

    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k) {
            const TransporterParams& t = c.transporters[l][k];
            const std::string where = std::string("transporters.") + kSideNames[l] + "." + kClassNames[k];
            if (!finite_nonnegative(t.regulation.rate) || !finite_nonnegative(t.regulation.target))
                violated("regulation-nonnegative", where + ".regulation rate and target must be non-negative");
            const std::pair<const char*, double> rates[] = {{"k1", t.k1},
                                                            {"k2", t.k2},
                                                            {"k3", t.k3},
                                                            {"k4", t.k4},
                                                            {"gamma_free", t.gamma_free},
                                                            {"gamma_bound", t.gamma_bound}};
            for (const auto& [name, v] : rates)
                if (!finite_nonnegative(v)) violated("rates-nonnegative", where + "." + name + " must be non-negative");
        }
    if (!(c.density > 0.0) || !std::isfinite(c.density)) violated("rates-nonnegative", "density must be positive");

    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
            if (!finite_nonnegative(c.initial_theta[l][k].free) || !finite_nonnegative(c.initial_theta[l][k].bound))
                violated("initial-nonnegative", std::string("initial theta.") + kSideNames[l] + "." + kClassNames[k] +
                                                    " must be non-negative");
    const std::pair<const char*, const std::string*> initial[] = {{"c_a", &c.initial_c_a}, {"c_s", &c.initial_c_s}};
    for (const auto& [name, text] : initial) {
        std::unique_ptr<Expression> e;
        try {
            e = std::make_unique<Expression>(*text);
        } catch (const ParseError& err) {
            violated("initial-nonnegative", std::string("initial ") + name + ": " + err.what());
        }
        // Sampled on a lattice twice as fine as the macroscopic mesh.
        const int n = std::max(2, static_cast<int>(std::ceil(2.0 * (c.domain.x1 - c.domain.x0) / c.domain.h)));
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                const double x = c.domain.x0 + (c.domain.x1 - c.domain.x0) * i / n;
                const double y = c.domain.y0 + (c.domain.y1 - c.domain.y0) * j / n;
                const double v = (*e)(x, y);
                if (!finite_nonnegative(v))
                    violated("initial-nonnegative", std::string("initial ") + name + " = " + std::to_string(v) +
                                                        " at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
            }
    }
    try {
        Expression dc(c.verify.dc);
    } catch (const ParseError& err) {
        violated("solver-settings", std::string("verify.dc: ") + err.what());
    }

    const double net = boundary_net_flux(c.domain);
    double scale = 0.0;
    for (const auto& s : c.domain.segments) scale += std::abs(s.v_d) * (s.b - s.a).norm();
    if (std::abs(net) > 1e-12 * std::max(1.0, scale))
        violated("boundary-divergence-free", "boundary normal velocity has net flux " + std::to_string(net));

    try {
        UnitCellGeometry g(c.cell);
    } catch (const Error& e) {
        violated("geometry", e.what());
    }
    if (!(c.domain.x1 > c.domain.x0) || !(c.domain.y1 > c.domain.y0))
        violated("geometry", "macroscopic domain must have positive extent");
    if (!(c.domain.h > 0.0) || c.domain.h > std::min(c.domain.x1 - c.domain.x0, c.domain.y1 - c.domain.y0))
        violated("geometry", "macroscopic mesh size must be positive and below the domain size");

    if (!(c.viscosity > 0.0) || !std::isfinite(c.viscosity)) violated("solver-settings", "viscosity must be positive");
    if (!(c.cutoff > 0.0)) violated("solver-settings", "velocity cutoff must be positive");
    if (!(c.cell_h > 0.0) || c.cell_h > 0.5) violated("solver-settings", "cell_h must lie in (0, 0.5]");
    try {
        c.macro.validate();
    } catch (const Error& e) {
        violated("solver-settings", e.what());
    }
    if (c.verify.cells_per_side.empty()) violated("solver-settings", "verify.cells_per_side is empty");
    for (int n : c.verify.cells_per_side)
        if (n < 1 || c.verify.macro_cells % n != 0)
            violated("solver-settings", "verify.cells_per_side entries must divide verify.macro_cells");
    if (c.outputs.dir.empty()) violated("solver-settings", "outputs.dir is empty");
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("config " + location(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
    const Reader r(text);
    r.keys(j, "", {"seed", "geometry", "physics", "solver", "outputs"});
    RunConfig c = default_config();
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) r.fail("seed", "expected a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        r.keys(g, "geometry", {"cell", "domain"});
        if (g.contains("cell")) read_cell(r, g.at("cell"), c.cell);
        if (g.contains("domain")) read_domain(r, g.at("domain"), c.domain);
    }
    if (j.contains("physics")) read_physics(r, j.at("physics"), c);
    if (j.contains("solver")) read_solver(r, j.at("solver"), c);
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        r.keys(o, "outputs", {"dir", "vtk"});
        r.string(o, "dir", "outputs", c.outputs.dir);
        r.boolean(o, "vtk", "outputs", c.outputs.vtk);
    }
    validate_config(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot read config file " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return parse_config(s.str());
}

RunConfig default_config() {
    RunConfig c;
    c.cell.shape = SymplastShape::Disk;
    c.cell.radius = 0.3;
    c.cell.wall_thickness = 0.1;
    c.cell.plasmodesmata = {{Side::Left, 0.12}, {Side::Right, 0.06}, {Side::Bottom, 0.08}, {Side::Top, 0.08}};
    c.domain = MacroDomainSpec::rectangle(0.0, 0.0, 1.0, 1.0, 1.0 / 16.0);
    c.K_aw = c.K_ap = c.K_sp = 0.01 * Mat2::Identity();
    c.membrane_z.solvent_diffusion = 0.25;
    c.membrane_as.solvent_diffusion = 3.0;
    TransporterParams t;
    t.k1 = 1.0;
    t.k2 = 0.5;
    t.k3 = 0.5;
    for (auto& side : c.transporters) side.fill(t);
    for (auto& side : c.initial_theta) side.fill(TransporterState{1.0, 0.0});
    c.initial_c_a = "1 + 0.5*cos(pi*x)";
    c.initial_c_s = "1.5 + 0.5*sin(pi*x)*sin(pi*y)";
    c.macro.dt = 1e-3;
    c.macro.t_end = 0.05;
    c.macro.output_every = 10;
    c.macro.lattice = 5;
    c.macro.refresh_every = 10;
    return c;
}

std::string default_config_json() {
    return R"json({
  "seed": 0,
  "geometry": {
    "cell": {
      "shape": "disk",
      "radius": 0.3,
      "corner_radius": 0.1,
      "wall_thickness": 0.1,
      "plasmodesmata": [
        {"side": "left", "width": 0.12},
        {"side": "right", "width": 0.06},
        {"side": "bottom", "width": 0.08},
        {"side": "top", "width": 0.08}
      ]
    },
    "domain": {
      "x0": 0, "y0": 0, "x1": 1, "y1": 1, "h": 0.0625,
      "v_d": {"left": 0, "right": 0, "bottom": 0, "top": 0}
    }
  },
  "physics": {
    "viscosity": 1,
    "K_aw": [[0.01, 0], [0, 0.01]],
    "K_ap": [[0.01, 0], [0, 0.01]],
    "K_sp": [[0.01, 0], [0, 0.01]],
    "membranes": {
      "z": {"reflection": 1, "thickness": 1, "solute_diffusion": 1, "barodiffusion": 0,
            "solvent_diffusion": 0.25, "solvent_pressure": 1, "density": 1},
      "as": {"reflection": 1, "thickness": 1, "solute_diffusion": 1, "barodiffusion": 0,
             "solvent_diffusion": 3, "solvent_pressure": 1, "density": 1}
    },
    "diffusion": {"aw": 1, "ap": 1, "z": 1, "sp": 1},
    "production": {"a": {"rate": 0, "capacity": 1}, "s": {"rate": 0, "capacity": 1}},
    "cutoff": 10,
    "density": 1,
    "transporters": {
      "a": {"z": {"k1": 1, "k2": 0.5, "k3": 0.5, "k4": 0, "gamma_free": 0, "gamma_bound": 0,
                  "regulation": {"rate": 0, "target": 0}},
            "as": {"k1": 1, "k2": 0.5, "k3": 0.5, "k4": 0, "gamma_free": 0, "gamma_bound": 0,
                   "regulation": {"rate": 0, "target": 0}}},
      "s": {"z": {"k1": 1, "k2": 0.5, "k3": 0.5, "k4": 0, "gamma_free": 0, "gamma_bound": 0,
                  "regulation": {"rate": 0, "target": 0}},
            "as": {"k1": 1, "k2": 0.5, "k3": 0.5, "k4": 0, "gamma_free": 0, "gamma_bound": 0,
                   "regulation": {"rate": 0, "target": 0}}}
    },
    "initial": {
      "c_a": "1 + 0.5*cos(pi*x)",
      "c_s": "1.5 + 0.5*sin(pi*x)*sin(pi*y)",
      "theta": {"a": {"z": {"free": 1, "bound": 0}, "as": {"free": 1, "bound": 0}},
                "s": {"z": {"free": 1, "bound": 0}, "as": {"free": 1, "bound": 0}}}
    }
  },
  "solver": {
    "cell_h": 0.1,
    "macro": {"dt": 0.001, "t_end": 0.05, "output_every": 10, "lattice": 5, "refresh_every": 10,
              "scheme": "exponential"},
    "verify": {"cells_per_side": [2, 4, 8], "dc": "sin(2*pi*x)*sin(2*pi*y)", "macro_cells": 64}
  },
  "outputs": {"dir": "out", "vtk": true}
}
)json";
}

}  // namespace plantflow
