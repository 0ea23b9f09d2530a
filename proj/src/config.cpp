#include "hmc/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "hmc/errors.hpp"

namespace hmc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

std::string fmt_tensor(const Mat2& k) { return fmt_list({k(0, 0), k(0, 1), k(1, 0), k(1, 1)}); }

struct Entry {
    std::string value;
    int line;
};

// Value parsing helpers; all report the key name and line.
double to_double(const std::string& key, const Entry& e) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (trim(e.value.substr(pos)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(key + ": expected a number, got '" + e.value + "'", e.line);
}

std::vector<double> to_list(const std::string& key, const Entry& e) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, {trim(item), e.line}));
    return out;
}

int to_int(const std::string& key, const Entry& e) {
    const double v = to_double(key, e);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ParseError(key + ": expected an integer", e.line);
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const Entry& e) {
    if (e.value == "true" || e.value == "yes" || e.value == "on" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "off" || e.value == "0") return false;
    throw ParseError(key + ": expected true/false, got '" + e.value + "'", e.line);
}

Mat2 to_tensor(const std::string& key, const Entry& e) {
    const auto v = to_list(key, e);
    Mat2 k;
    if (v.size() == 1)
        k = v[0] * Mat2::Identity();
    else if (v.size() == 2)
        k << v[0], 0.0, 0.0, v[1];
    else if (v.size() == 4)
        k << v[0], v[1], v[2], v[3];
    else
        throw ParseError(key + ": expected 1, 2 (diagonal) or 4 (row-major) values", e.line);
    return k;
}

Vec2 to_vec2(const std::string& key, const Entry& e) {
    const auto v = to_list(key, e);
    if (v.size() != 2) throw ParseError(key + ": expected two comma-separated values", e.line);
    return {v[0], v[1]};
}

std::array<double, 6> to_row(const std::string& key, const Entry& e) {
    const auto v = to_list(key, e);
    if (v.size() != 6) throw ParseError(key + ": expected six coefficients", e.line);
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

DiagonalPattern to_pattern(const std::string& key, const Entry& e) {
    if (e.value == "right") return DiagonalPattern::right;
    if (e.value == "left") return DiagonalPattern::left;
    if (e.value == "crossed") return DiagonalPattern::crossed;
    throw ParseError(key + ": expected right, left or crossed", e.line);
}

const char* pattern_name(DiagonalPattern p) {
    switch (p) {
    case DiagonalPattern::right: return "right";
    case DiagonalPattern::left: return "left";
    case DiagonalPattern::crossed: return "crossed";
    }
    return "right";
}

MechanicsBC to_mech(const std::string& key, const Entry& e) {
    for (auto b : {MechanicsBC::roller, MechanicsBC::traction, MechanicsBC::fixed, MechanicsBC::free})
        if (e.value == to_string(b)) return b;
    throw ParseError(key + ": expected roller, traction, fixed or free", e.line);
}

FlowBC to_flow(const std::string& key, const Entry& e) {
    if (e.value == "flux") return FlowBC::flux;
    if (e.value == "pressure") return FlowBC::pressure;
    throw ParseError(key + ": expected flux or pressure", e.line);
}

using Section = std::map<std::string, Entry>;

struct Document {
    std::vector<std::pair<std::string, int>> order;   // section names with header lines
    std::map<std::string, Section> sections;
};

Document tokenize(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string raw, current;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", lineno);
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty()) throw ParseError("empty section name", lineno);
            if (doc.sections.count(current)) throw ParseError("duplicate section [" + current + "]", lineno);
            doc.sections[current];
            doc.order.emplace_back(current, lineno);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected `key = value`", lineno);
        if (current.empty()) throw ParseError("key outside of any section", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno);
        if (value.empty()) throw ParseError(current + "." + key + ": empty value", lineno);
        auto& sec = doc.sections[current];
        if (sec.count(key))
            throw ParseError(current + "." + key + ": duplicate key (first set on line " +
                                 std::to_string(sec[key].line) + ")",
                             lineno);
        sec[key] = {value, lineno};
    }
    return doc;
}

void apply_section(SimulationConfig& c, const std::string& name, const Section& sec, int header_line) {
    using Handler = std::function<void(const std::string&, const Entry&)>;
    std::map<std::string, Handler> h;
    MaterialParams& m = c.material;

    if (name == "scenario") {
        h["preset"] = [&](auto&, auto& e) { c.preset = e.value; };
        h["transport"] = [&](auto& k, auto& e) { c.transport = to_bool(k, e); };
    } else if (name == "mesh") {
        h["length"] = [&](auto& k, auto& e) { c.mesh.length = to_double(k, e); };
        h["height"] = [&](auto& k, auto& e) { c.mesh.height = to_double(k, e); };
        h["nx"] = [&](auto& k, auto& e) { c.mesh.nx = to_int(k, e); };
        h["ny"] = [&](auto& k, auto& e) { c.mesh.ny = to_int(k, e); };
        h["pattern"] = [&](auto& k, auto& e) { c.mesh.pattern = to_pattern(k, e); };
        h["file"] = [&](auto&, auto& e) { c.mesh.file = e.value; };
    } else if (name == "rock") {
        h["K"] = [&](auto& k, auto& e) { m.K = to_double(k, e); };
        h["nu"] = [&](auto& k, auto& e) { m.nu = to_double(k, e); };
        h["alpha"] = [&](auto& k, auto& e) { m.alpha = to_double(k, e); };
        h["phi0"] = [&](auto& k, auto& e) { m.phi0 = to_double(k, e); };
        h["k"] = [&](auto& k, auto& e) { m.k0 = to_tensor(k, e); };
        h["b"] = [&](auto& k, auto& e) { m.b = to_double(k, e); };
        h["rho_s"] = [&](auto& k, auto& e) { m.rho_s = to_double(k, e); };
        h["omega"] = [&](auto& k, auto& e) { m.omega = to_double(k, e); };
        h["A0"] = [&](auto& k, auto& e) { m.A0 = to_double(k, e); };
    } else if (name == "fluid") {
        h["cf"] = [&](auto& k, auto& e) { m.cf = to_double(k, e); };
        h["rho"] = [&](auto& k, auto& e) { m.rho = to_double(k, e); };
        h["D"] = [&](auto& k, auto& e) { m.D = to_tensor(k, e); };
        h["mu_l"] = [&](auto& k, auto& e) { m.mu_l = to_double(k, e); };
        h["mu_h"] = [&](auto& k, auto& e) { m.mu_h = to_double(k, e); };
        h["c_l"] = [&](auto& k, auto& e) { m.c_l = to_double(k, e); };
        h["c_h"] = [&](auto& k, auto& e) { m.c_h = to_double(k, e); };
        h["viscosity"] = [&](auto& k, auto& e) { m.viscosity = to_double(k, e); };
    } else if (name == "chemistry") {
        h["temp"] = [&](auto& k, auto& e) { m.temp = to_double(k, e); };
        h["ceq_scale"] = [&](auto& k, auto& e) { m.ceq_scale = to_double(k, e); };
        h["reaction_cap"] = [&](auto& k, auto& e) { m.reaction_cap = to_bool(k, e); };
        h["table_pos"] = [&](auto& k, auto& e) { m.table.rows[0] = to_row(k, e); };
        h["table_neg"] = [&](auto& k, auto& e) { m.table.rows[1] = to_row(k, e); };
        h["table_mid"] = [&](auto& k, auto& e) { m.table.rows[2] = to_row(k, e); };
    } else if (name == "source") {
        h["g"] = [&](auto& k, auto& e) { m.g = to_double(k, e); };
        h["f"] = [&](auto& k, auto& e) { m.f = to_vec2(k, e); };
    } else if (name == "initial") {
        h["p0"] = [&](auto& k, auto& e) { c.p0 = to_double(k, e); };
        h["c0"] = [&](auto& k, auto& e) { c.c0 = to_double(k, e); };
    } else if (name == "time") {
        h["dt0"] = [&](auto& k, auto& e) { c.time.dt0 = to_double(k, e); };
        h["dt_max"] = [&](auto& k, auto& e) { c.time.dt_max = to_double(k, e); };
        h["cfl"] = [&](auto& k, auto& e) { c.time.cfl = to_double(k, e); };
        h["t_end"] = [&](auto& k, auto& e) { c.time.t_end = to_double(k, e); };
        h["max_steps"] = [&](auto& k, auto& e) { c.time.max_steps = to_int(k, e); };
    } else if (name == "solver") {
        h["tol"] = [&](auto& k, auto& e) { c.solver.tol = to_double(k, e); };
        h["max_iterations"] = [&](auto& k, auto& e) { c.solver.max_iterations = to_int(k, e); };
        h["beta"] = [&](auto& k, auto& e) { c.solver.beta = to_double(k, e); };
        h["theta"] = [&](auto& k, auto& e) { c.solver.theta = to_double(k, e); };
        h["gamma"] = [&](auto& k, auto& e) { c.solver.gamma = to_double(k, e); };
        h["bdf_order"] = [&](auto& k, auto& e) { c.solver.bdf_order = to_int(k, e); };
    } else if (name == "output") {
        h["dir"] = [&](auto&, auto& e) { c.output.dir = e.value; };
        h["cadence"] = [&](auto& k, auto& e) { c.output.cadence = to_int(k, e); };
        h["vtk"] = [&](auto& k, auto& e) { c.output.vtk = to_bool(k, e); };
        h["csv"] = [&](auto& k, auto& e) { c.output.csv = to_bool(k, e); };
    } else if (name == "randfield") {
        auto& r = c.randfield;
        h["enabled"] = [&](auto& k, auto& e) { r.enabled = to_bool(k, e); };
        h["mean"] = [&](auto& k, auto& e) { r.spec.mean = to_double(k, e); };
        h["variance"] = [&](auto& k, auto& e) { r.spec.variance = to_double(k, e); };
        h["lx"] = [&](auto& k, auto& e) { r.spec.lx = to_double(k, e); };
        h["ly"] = [&](auto& k, auto& e) { r.spec.ly = to_double(k, e); };
        h["seed"] = [&](auto& k, auto& e) {
            const double v = to_double(k, e);
            if (v < 0 || v != std::floor(v)) throw ParseError(k + ": expected a non-negative integer", e.line);
            r.spec.seed = static_cast<std::uint64_t>(v);
        };
        h["file"] = [&](auto&, auto& e) { r.file = e.value; };
    } else if (name.rfind("bc.", 0) == 0) {
        Wall w;
        try {
            w = wall_from_string(name.substr(3));
        } catch (const Error&) {
            throw ParseError("unknown wall in [" + name + "]; expected left, top, right or bottom", header_line);
        }
        WallBC& b = c.bc[static_cast<int>(w)];
        h["mechanics"] = [&](auto& k, auto& e) { b.mechanics = to_mech(k, e); };
        h["traction"] = [&](auto& k, auto& e) { b.traction = to_vec2(k, e); };
        h["flow"] = [&](auto& k, auto& e) { b.flow = to_flow(k, e); };
        h["flux"] = [&](auto& k, auto& e) { b.flux = to_double(k, e); };
        h["pressure"] = [&](auto& k, auto& e) { b.pressure = to_double(k, e); };
        h["c_in"] = [&](auto& k, auto& e) { b.c_in = to_double(k, e); };
        // a flow type may carry only its own value
        auto flow_it = sec.find("flow");
        const FlowBC declared = flow_it != sec.end() ? to_flow(name + ".flow", flow_it->second) : b.flow;
        if (declared == FlowBC::flux && sec.count("pressure"))
            throw ParseError(name + ".pressure: conflicts with flow = flux on the same wall", sec.at("pressure").line);
        if (declared == FlowBC::pressure && sec.count("flux"))
            throw ParseError(name + ".flux: conflicts with flow = pressure on the same wall", sec.at("flux").line);
        if (declared == FlowBC::flux && flow_it != sec.end() && b.flow == FlowBC::pressure) b.pressure = 0.0;
        if (declared == FlowBC::pressure && flow_it != sec.end() && b.flow == FlowBC::flux) b.flux = 0.0;
        auto mech_it = sec.find("mechanics");
        const MechanicsBC mdecl = mech_it != sec.end() ? to_mech(name + ".mechanics", mech_it->second) : b.mechanics;
        if (mdecl != MechanicsBC::traction && sec.count("traction"))
            throw ParseError(name + ".traction: only valid with mechanics = traction", sec.at("traction").line);
        if (mdecl != MechanicsBC::traction && mech_it != sec.end()) b.traction = Vec2::Zero();
    } else if (name.rfind("layer.", 0) == 0) {
        // handled by the caller
        return;
    } else {
        throw ParseError("unknown section [" + name + "]", header_line);
    }

    for (const auto& [key, entry] : sec) {
        auto it = h.find(key);
        if (it == h.end()) throw ParseError("unknown key '" + key + "' in [" + name + "]", entry.line);
        it->second(name + "." + key, entry);
    }
}

LayerConfig parse_layer(const std::string& name, const Section& sec, int header_line) {
    LayerConfig l;
    bool has[3] = {false, false, false};
    for (const auto& [key, e] : sec) {
        const std::string k = name + "." + key;
        if (key == "ymin") {
            l.ymin = to_double(k, e);
            has[0] = true;
        } else if (key == "ymax") {
            l.ymax = to_double(k, e);
            has[1] = true;
        } else if (key == "k") {
            l.k = to_tensor(k, e);
            has[2] = true;
        } else {
            throw ParseError("unknown key '" + key + "' in [" + name + "]", e.line);
        }
    }
    if (!has[0] || !has[1] || !has[2]) throw ParseError("[" + name + "] needs ymin, ymax and k", header_line);
    return l;
}

SimulationConfig example1(double flux, double t_end) {
    SimulationConfig c;
    c.preset = flux > 1.5e-4 ? "example1a" : "example1b";
    c.mesh = MeshConfig{};
    c.p0 = 1e6;
    c.time.t_end = t_end;
    WallBC& left = c.bc[static_cast<int>(Wall::left)];
    left.mechanics = MechanicsBC::roller;
    left.flow = FlowBC::flux;
    left.flux = flux;
    left.c_in = 0.5;
    WallBC& top = c.bc[static_cast<int>(Wall::top)];
    top.mechanics = MechanicsBC::traction;
    top.traction = Vec2(0.0, -2.0e6);
    top.flow = FlowBC::flux;
    top.flux = 0.0;
    WallBC& right = c.bc[static_cast<int>(Wall::right)];
    right.mechanics = MechanicsBC::roller;
    right.flow = FlowBC::pressure;
    right.pressure = 1e5;
    WallBC& bottom = c.bc[static_cast<int>(Wall::bottom)];
    bottom.mechanics = MechanicsBC::roller;
    bottom.flow = FlowBC::flux;
    bottom.flux = 0.0;
    return c;
}

} // namespace

double undrained_pressure(const MaterialParams& m, double load) {
    const auto [lambda, shear] = lame_constants(m.K, m.nu);
    const double mv = 1.0 / (lambda + 2.0 * shear);
    const double inv_m = biot_modulus_inverse(m.phi0, m.cf, m.alpha, m.Ks());
    return m.alpha * mv * load / (inv_m + m.alpha * m.alpha * mv);
}

std::vector<std::string> preset_names() {
    return {"example1a", "example1b", "example2", "example3", "example4", "terzaghi"};
}

SimulationConfig preset_config(const std::string& name) {
    if (name == "example1a") return example1(2e-4, 60000.0);
    if (name == "example1b") return example1(1e-4, 120000.0);
    if (name == "example2") {
        SimulationConfig c = example1(2e-4, 60000.0);
        c.preset = name;
        c.layers = {{0.0, 10.0, 8.8e-11 * Mat2::Identity()},
                    {10.0, 20.0, 8.8e-10 * Mat2::Identity()},
                    {20.0, 30.0, 8.8e-11 * Mat2::Identity()}};
        return c;
    }
    if (name == "example3") {
        SimulationConfig c = example1(2e-4, 60000.0);
        c.preset = name;
        c.randfield.enabled = true;
        c.randfield.spec = RandomFieldSpec{1e-10, 0.5, 5.0, 1.0, 1};
        return c;
    }
    if (name == "example4") {
        SimulationConfig c = example1(2e-4, 120000.0);
        c.preset = name;
        c.material.k0 << 8.8e-10, 0.0, 0.0, 8.8e-11;
        return c;
    }
    if (name == "terzaghi") {
        SimulationConfig c;
        c.preset = name;
        c.transport = false;
        c.mesh = MeshConfig{1.0, 10.0, 1, 40, DiagonalPattern::right, ""};
        c.material.k0 = 1e-13 * Mat2::Identity();
        c.material.b = 0.0;
        c.material.viscosity = 1e-3;
        const double load = 1e6;
        for (Wall w : all_walls) {
            WallBC& b = c.bc[static_cast<int>(w)];
            b.mechanics = MechanicsBC::roller;
            b.flow = FlowBC::flux;
            b.flux = 0.0;
        }
        WallBC& top = c.bc[static_cast<int>(Wall::top)];
        top.mechanics = MechanicsBC::traction;
        top.traction = Vec2(0.0, -load);
        top.flow = FlowBC::pressure;
        top.pressure = 0.0;
        c.p0 = undrained_pressure(c.material, load);
        c.time = TimeConfig{0.05, 0.05, 1e6, 45.0, 100000};
        // with steps this short the porosity gap of a single pass already sits
        // below 1e-6, so the split needs a tighter tolerance to converge the stress
        c.solver.tol = 1e-10;
        c.output.cadence = 0;
        return c;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

void SimulationConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
    material.validate();
    if (mesh.file.empty()) {
        if (!(mesh.length > 0)) fail("mesh.length", "must be positive");
        if (!(mesh.height > 0)) fail("mesh.height", "must be positive");
        if (mesh.nx < 1) fail("mesh.nx", "must be at least 1");
        if (mesh.ny < 1) fail("mesh.ny", "must be at least 1");
    }
    if (!(time.dt0 > 0)) fail("time.dt0", "must be positive");
    if (!(time.dt_max > 0)) fail("time.dt_max", "must be positive");
    if (!(time.cfl > 0)) fail("time.cfl", "must be positive");
    if (!(time.t_end > 0)) fail("time.t_end", "must be positive");
    if (time.max_steps < 1) fail("time.max_steps", "must be at least 1");
    if (!(solver.tol > 0)) fail("solver.tol", "must be positive");
    if (solver.max_iterations < 1) fail("solver.max_iterations", "must be at least 1");
    if (!(solver.beta > 0)) fail("solver.beta", "must be positive");
    if (!(solver.theta >= -1 && solver.theta <= 1)) fail("solver.theta", "must lie in [-1, 1]");
    if (!(solver.gamma >= 0)) fail("solver.gamma", "must be non-negative");
    if (solver.bdf_order < 1 || solver.bdf_order > 4) fail("solver.bdf_order", "must be 1..4");
    if (output.cadence < 0) fail("output.cadence", "must be non-negative");
    if (randfield.enabled) {
        if (!(randfield.spec.mean > 0)) fail("randfield.mean", "must be positive");
        if (!(randfield.spec.variance >= 0)) fail("randfield.variance", "must be non-negative");
        if (!(randfield.spec.lx > 0 && randfield.spec.ly > 0)) fail("randfield.lx/ly", "must be positive");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        const std::string key = "layer." + std::to_string(i);
        if (!(l.ymax > l.ymin)) fail(key, "ymax must exceed ymin");
        if (!(l.k(0, 0) > 0 && l.k.determinant() > 0)) fail(key + ".k", "must be positive definite");
    }
    bool any_pressure = false;
    for (Wall w : all_walls) {
        const WallBC& b = bc[static_cast<int>(w)];
        const std::string key = "bc." + to_string(w);
        if (b.flow == FlowBC::pressure) any_pressure = true;
        if (b.flow == FlowBC::flux && b.pressure != 0.0) fail(key, "pressure value given on a flux wall");
        if (b.flow == FlowBC::pressure && b.flux != 0.0) fail(key, "flux value given on a pressure wall");
        if (b.c_in && !std::isfinite(*b.c_in)) fail(key + ".c_in", "must be finite");
    }
    if (!any_pressure && !(material.cf > 0 || material.alpha > 0))
        fail("bc", "pure-flux flow problem without storage is singular");
}

bool operator==(const SimulationConfig& a, const SimulationConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

std::string serialize_config(const SimulationConfig& c) {
    std::ostringstream os;
    const MaterialParams& m = c.material;
    os << "[scenario]\n";
    if (!c.preset.empty()) os << "preset = " << c.preset << "\n";
    os << "transport = " << (c.transport ? "true" : "false") << "\n\n";
    os << "[mesh]\n";
    if (!c.mesh.file.empty()) os << "file = " << c.mesh.file << "\n";
    os << "length = " << fmt(c.mesh.length) << "\nheight = " << fmt(c.mesh.height) << "\nnx = " << c.mesh.nx
       << "\nny = " << c.mesh.ny << "\npattern = " << pattern_name(c.mesh.pattern) << "\n\n";
    os << "[rock]\nK = " << fmt(m.K) << "\nnu = " << fmt(m.nu) << "\nalpha = " << fmt(m.alpha) << "\nphi0 = " << fmt(m.phi0)
       << "\nk = " << fmt_tensor(m.k0) << "\nb = " << fmt(m.b) << "\nrho_s = " << fmt(m.rho_s) << "\nomega = " << fmt(m.omega)
       << "\nA0 = " << fmt(m.A0) << "\n\n";
    os << "[fluid]\ncf = " << fmt(m.cf) << "\nrho = " << fmt(m.rho) << "\nD = " << fmt_tensor(m.D) << "\nmu_l = " << fmt(m.mu_l)
       << "\nmu_h = " << fmt(m.mu_h) << "\nc_l = " << fmt(m.c_l) << "\nc_h = " << fmt(m.c_h) << "\n";
    if (m.viscosity) os << "viscosity = " << fmt(*m.viscosity) << "\n";
    os << "\n[chemistry]\ntemp = " << fmt(m.temp) << "\nceq_scale = " << fmt(m.ceq_scale)
       << "\nreaction_cap = " << (m.reaction_cap ? "true" : "false") << "\n";
    const char* rows[3] = {"table_pos", "table_neg", "table_mid"};
    for (int r = 0; r < 3; ++r)
        os << rows[r] << " = " << fmt_list({m.table.rows[r].begin(), m.table.rows[r].end()}) << "\n";
    os << "\n[source]\ng = " << fmt(m.g) << "\nf = " << fmt_list({m.f.x(), m.f.y()}) << "\n\n";
    os << "[initial]\np0 = " << fmt(c.p0) << "\n";
    if (c.c0) os << "c0 = " << fmt(*c.c0) << "\n";
    os << "\n[time]\ndt0 = " << fmt(c.time.dt0) << "\ndt_max = " << fmt(c.time.dt_max) << "\ncfl = " << fmt(c.time.cfl)
       << "\nt_end = " << fmt(c.time.t_end) << "\nmax_steps = " << c.time.max_steps << "\n\n";
    os << "[solver]\ntol = " << fmt(c.solver.tol) << "\nmax_iterations = " << c.solver.max_iterations
       << "\nbeta = " << fmt(c.solver.beta) << "\ntheta = " << fmt(c.solver.theta) << "\ngamma = " << fmt(c.solver.gamma)
       << "\nbdf_order = " << c.solver.bdf_order << "\n\n";
    os << "[output]\ndir = " << c.output.dir << "\ncadence = " << c.output.cadence
       << "\nvtk = " << (c.output.vtk ? "true" : "false") << "\ncsv = " << (c.output.csv ? "true" : "false") << "\n\n";
    const auto& r = c.randfield;
    os << "[randfield]\nenabled = " << (r.enabled ? "true" : "false") << "\nmean = " << fmt(r.spec.mean)
       << "\nvariance = " << fmt(r.spec.variance) << "\nlx = " << fmt(r.spec.lx) << "\nly = " << fmt(r.spec.ly)
       << "\nseed = " << r.spec.seed << "\n";
    if (!r.file.empty()) os << "file = " << r.file << "\n";
    for (Wall w : all_walls) {
        const WallBC& b = c.bc[static_cast<int>(w)];
        os << "\n[bc." << to_string(w) << "]\nmechanics = " << to_string(b.mechanics) << "\n";
        if (b.mechanics == MechanicsBC::traction) os << "traction = " << fmt_list({b.traction.x(), b.traction.y()}) << "\n";
        os << "flow = " << to_string(b.flow) << "\n";
        if (b.flow == FlowBC::flux)
            os << "flux = " << fmt(b.flux) << "\n";
        else
            os << "pressure = " << fmt(b.pressure) << "\n";
        if (b.c_in) os << "c_in = " << fmt(*b.c_in) << "\n";
    }
    for (std::size_t i = 0; i < c.layers.size(); ++i) {
        const auto& l = c.layers[i];
        os << "\n[layer." << i << "]\nymin = " << fmt(l.ymin) << "\nymax = " << fmt(l.ymax) << "\nk = " << fmt_tensor(l.k)
           << "\n";
    }
    return os.str();
}

SimulationConfig parse_config_string(const std::string& text) {
    const Document doc = tokenize(text);
    SimulationConfig c;
    auto sc = doc.sections.find("scenario");
    if (sc != doc.sections.end()) {
        auto p = sc->second.find("preset");
        if (p != sc->second.end()) {
            try {
                c = preset_config(p->second.value);
            } catch (const ConfigError&) {
                throw ParseError("scenario.preset: unknown preset '" + p->second.value + "'", p->second.line);
            }
        }
    }
    bool layers_seen = false;
    std::map<int, LayerConfig> layers;
    for (const auto& [name, line] : doc.order) {
        const Section& sec = doc.sections.at(name);
        if (name.rfind("layer.", 0) == 0) {
            int idx = -1;
            try {
                std::size_t pos = 0;
                idx = std::stoi(name.substr(6), &pos);
                if (pos != name.size() - 6 || idx < 0) idx = -1;
            } catch (const std::exception&) {
            }
            if (idx < 0) throw ParseError("layer sections are named [layer.N] with N >= 0", line);
            layers_seen = true;
            layers[idx] = parse_layer(name, sec, line);
            continue;
        }
        apply_section(c, name, sec, line);
    }
    if (layers_seen) {
        c.layers.clear();
        for (auto& [i, l] : layers) c.layers.push_back(l);
    }
    c.validate();
    return c;
}

SimulationConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_string(ss.str());
}

} // namespace hmc
