#include "ctc/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ctc/errors.hpp"

namespace ctc {

namespace {

std::string fmt_double(double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string fmt_complex(const std::complex<double>& z) {
    std::string s = fmt_double(z.real());
    if (z.imag() != 0.0) {
        s += z.imag() > 0.0 ? "+" : "-";
        s += fmt_double(std::abs(z.imag()));
        s += "i";
    }
    return s;
}

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty number");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw std::invalid_argument("malformed number '" + s + "'");
    }
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

std::complex<double> parse_complex(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty pole");
    if (s.back() != 'i') return {parse_double(s), 0.0};
    const std::string body = s.substr(0, s.size() - 1);
    // Split at the last +/- that is not an exponent sign or leading sign.
    size_t pos = std::string::npos;
    for (size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') &&
            body[i - 1] != 'e' && body[i - 1] != 'E') {
            pos = i;
            break;
        }
    }
    if (pos == std::string::npos) return {0.0, parse_double(body)};
    double imag = parse_double(body.substr(pos + 1));
    if (body[pos] == '-') imag = -imag;
    return {parse_double(body.substr(0, pos)), imag};
}

Eigen::Vector3d parse_vec3(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) throw std::invalid_argument("expected three comma-separated values");
    return {parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])};
}

std::string fmt_vec3(const Eigen::Vector3d& v) {
    return fmt_double(v[0]) + "," + fmt_double(v[1]) + "," + fmt_double(v[2]);
}

template <size_t N>
std::array<std::complex<double>, N> parse_poles(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != N) {
        throw std::invalid_argument("expected " + std::to_string(N) + " poles, got " +
                                    std::to_string(parts.size()));
    }
    std::array<std::complex<double>, N> out;
    for (size_t i = 0; i < N; ++i) out[i] = parse_complex(parts[i]);
    return out;
}

template <size_t N>
std::string fmt_poles(const std::array<std::complex<double>, N>& poles) {
    std::string s;
    for (size_t i = 0; i < N; ++i) {
        if (i) s += ",";
        s += fmt_complex(poles[i]);
    }
    return s;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"scenario.name", [](ScenarioConfig& c, const std::string& v) { c.name = v; }},
        {"curve.type",
         [](ScenarioConfig& c, const std::string& v) {
             if (v == "line") c.curve.type = CurveType::Line;
             else if (v == "circle") c.curve.type = CurveType::Circle;
             else if (v == "helix") c.curve.type = CurveType::Helix;
             else throw std::invalid_argument("curve.type must be line|circle|helix");
         }},
        {"curve.radius", [](ScenarioConfig& c, const std::string& v) { c.curve.radius = parse_double(v); }},
        {"curve.pitch", [](ScenarioConfig& c, const std::string& v) { c.curve.pitch = parse_double(v); }},
        {"curve.origin", [](ScenarioConfig& c, const std::string& v) { c.curve.origin = parse_vec3(v); }},
        {"curve.direction", [](ScenarioConfig& c, const std::string& v) { c.curve.direction = parse_vec3(v); }},
        {"curve.half_length", [](ScenarioConfig& c, const std::string& v) { c.curve.half_length = parse_double(v); }},
        {"curve.s_min", [](ScenarioConfig& c, const std::string& v) { c.curve.s_min = parse_double(v); }},
        {"curve.s_max", [](ScenarioConfig& c, const std::string& v) { c.curve.s_max = parse_double(v); }},
        {"params.m", [](ScenarioConfig& c, const std::string& v) { c.params.m = parse_double(v); }},
        {"params.C", [](ScenarioConfig& c, const std::string& v) { c.params.C = parse_double(v); }},
        {"params.rho", [](ScenarioConfig& c, const std::string& v) { c.params.rho = parse_double(v); }},
        {"params.ell", [](ScenarioConfig& c, const std::string& v) { c.params.ell = parse_double(v); }},
        {"params.J0", [](ScenarioConfig& c, const std::string& v) { c.params.J0 = parse_double(v); }},
        {"params.Jpsi", [](ScenarioConfig& c, const std::string& v) { c.params.Jpsi = parse_double(v); }},
        {"params.g", [](ScenarioConfig& c, const std::string& v) { c.params.g = parse_double(v); }},
        {"init.s", [](ScenarioConfig& c, const std::string& v) { c.init.s = parse_double(v); }},
        {"init.e1", [](ScenarioConfig& c, const std::string& v) { c.init.e1 = parse_double(v); }},
        {"init.e2", [](ScenarioConfig& c, const std::string& v) { c.init.e2 = parse_double(v); }},
        {"init.delta_phi", [](ScenarioConfig& c, const std::string& v) { c.init.delta_phi = parse_double(v); }},
        {"init.theta", [](ScenarioConfig& c, const std::string& v) { c.init.theta = parse_double(v); }},
        {"init.psi", [](ScenarioConfig& c, const std::string& v) { c.init.psi = parse_double(v); }},
        {"init.speed", [](ScenarioConfig& c, const std::string& v) { c.init.speed = parse_double(v); }},
        {"init.position", [](ScenarioConfig& c, const std::string& v) { c.init.position = parse_vec3(v); }},
        {"init.velocity", [](ScenarioConfig& c, const std::string& v) { c.init.velocity = parse_vec3(v); }},
        {"init.attitude", [](ScenarioConfig& c, const std::string& v) { c.init.attitude = parse_vec3(v); }},
        {"init.rates", [](ScenarioConfig& c, const std::string& v) { c.init.rates = parse_vec3(v); }},
        {"reference.v_star", [](ScenarioConfig& c, const std::string& v) { c.reference.v_star = parse_double(v); }},
        {"reference.s0", [](ScenarioConfig& c, const std::string& v) { c.reference.s0 = parse_double(v); }},
        {"reference.phi_star_mode",
         [](ScenarioConfig& c, const std::string& v) {
             if (v == "from-tangent") c.reference.phi_star_mode = ReferenceSpec::PhiStarMode::FromTangent;
             else if (v == "constant") c.reference.phi_star_mode = ReferenceSpec::PhiStarMode::Constant;
             else throw std::invalid_argument("reference.phi_star_mode must be from-tangent|constant");
         }},
        {"reference.phi_star_value",
         [](ScenarioConfig& c, const std::string& v) { c.reference.phi_star_value = parse_double(v); }},
        {"controller.mode",
         [](ScenarioConfig& c, const std::string& v) {
             if (v == "state") c.mode = ControllerMode::FullState;
             else if (v == "output") c.mode = ControllerMode::OutputFeedback;
             else throw std::invalid_argument("controller.mode must be state|output");
         }},
        {"controller.poles",
         [](ScenarioConfig& c, const std::string& v) { c.controller_poles = parse_poles<4>(v); }},
        {"observer.poles",
         [](ScenarioConfig& c, const std::string& v) { c.observer_poles = parse_poles<5>(v); }},
        {"observer.k", [](ScenarioConfig& c, const std::string& v) { c.observer_k = parse_double(v); }},
        {"observer.N", [](ScenarioConfig& c, const std::string& v) { c.observer_n = parse_double(v); }},
        {"sat.l", [](ScenarioConfig& c, const std::string& v) { c.sat_l = parse_double(v); }},
        {"sim.dt", [](ScenarioConfig& c, const std::string& v) { c.dt = parse_double(v); }},
        {"sim.t_end", [](ScenarioConfig& c, const std::string& v) { c.t_end = parse_double(v); }},
        {"sim.tail_fraction", [](ScenarioConfig& c, const std::string& v) { c.tail_fraction = parse_double(v); }},
        {"tolerances.v_tilde_max",
         [](ScenarioConfig& c, const std::string& v) { c.tol.v_tilde_max = parse_double(v); }},
        {"tolerances.theta_tilde_max",
         [](ScenarioConfig& c, const std::string& v) { c.tol.theta_tilde_max = parse_double(v); }},
        {"tolerances.e_max", [](ScenarioConfig& c, const std::string& v) { c.tol.e_max = parse_double(v); }},
    };
    return table;
}

void finalize_defaults(ScenarioConfig& cfg, const std::set<std::string>& seen) {
    if (!seen.count("reference.s0")) cfg.reference.s0 = cfg.init.s;
    if (!seen.count("tolerances.v_tilde_max")) {
        cfg.tol.v_tilde_max = 0.05 * cfg.reference.v_star;
    }
    if (!seen.count("observer.N")) cfg.observer_n = 10.0 * cfg.params.g;
}

}  // namespace

std::shared_ptr<Curve> CurveSpec::build() const {
    switch (type) {
        case CurveType::Line:
            return make_line(origin, direction, half_length);
        case CurveType::Circle:
            return make_circle(radius);
        case CurveType::Helix:
            return make_helix(radius, pitch, s_min, s_max);
    }
    throw ConfigError("curve.type: unhandled curve type");
}

ControllerGains ScenarioConfig::controller_gains() const {
    return gains_from_poles(controller_poles);
}

ObserverGains ScenarioConfig::observer_gains() const {
    ObserverGains og;
    og.a = observer_coeffs_from_poles(observer_poles);
    og.k = observer_k;
    og.N = observer_n;
    return og;
}

std::optional<double> ScenarioConfig::alpha_override() const {
    if (reference.phi_star_mode == ReferenceSpec::PhiStarMode::Constant) {
        return reference.phi_star_value;
    }
    return std::nullopt;
}

QuadState ScenarioConfig::initial_state(const Curve& c) const {
    QuadState x;
    if (init.position) {
        x.position = *init.position;
        x.velocity = *init.velocity;
        x.attitude = *init.attitude;
        x.attitude_rate = *init.rates;
        return x;
    }
    const CurveFrame f = frame_at(c, init.s, alpha_override());
    if (f.vertical && !alpha_override()) {
        throw ConfigError(
            "init.s: vertical tangent at the start; set reference.phi_star_mode = constant");
    }
    const double ca = std::cos(f.alpha), sa = std::sin(f.alpha);
    const double cb = std::cos(f.beta), sb = std::sin(f.beta);
    const Eigen::Vector3d a2(-sa, ca, 0.0);
    const Eigen::Vector3d a3(-ca * sb, -sa * sb, cb);
    x.position = f.point + init.e1 * a2 + init.e2 * a3;
    x.attitude = {f.alpha + init.delta_phi, init.theta, init.psi};
    x.velocity = init.speed.value_or(reference.v_star) * f.tangent;
    x.attitude_rate = Eigen::Vector3d::Zero();
    return x;
}

void ScenarioConfig::validate() const {
    const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (name.empty()) fail("scenario.name: must be non-empty");
    for (char ch : name) {
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) {
            fail("scenario.name: only letters, digits, '_' and '-' allowed");
        }
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("params: ") + e.what());
    }
    if (!(curve.radius > 0.0)) fail("curve.radius: must be positive");
    if (curve.type == CurveType::Line && curve.direction.norm() == 0.0) {
        fail("curve.direction: must be nonzero");
    }
    if (!(curve.half_length > 0.0)) fail("curve.half_length: must be positive");
    if (curve.s_min && curve.s_max && !(*curve.s_max > *curve.s_min)) {
        fail("curve.s_max: must exceed curve.s_min");
    }
    const bool any_explicit =
        init.position || init.velocity || init.attitude || init.rates;
    const bool all_explicit =
        init.position && init.velocity && init.attitude && init.rates;
    if (any_explicit && !all_explicit) {
        fail("init.position/velocity/attitude/rates: give all four or none");
    }
    if (!(reference.v_star > 0.0)) fail("reference.v_star: must be positive");
    try {
        (void)controller_gains();
    } catch (const std::invalid_argument& e) {
        fail(std::string("controller.poles: ") + e.what());
    }
    try {
        (void)observer_gains();
    } catch (const std::invalid_argument& e) {
        fail(std::string("observer.poles: ") + e.what());
    }
    if (!(observer_k > 0.0)) fail("observer.k: must be positive");
    if (!(observer_n > 0.0)) fail("observer.N: must be positive");
    if (!(sat_l > 0.0 && sat_l < 1.0)) fail("sat.l: must lie in (0, 1)");
    if (!(dt > 0.0)) fail("sim.dt: must be positive");
    if (!(t_end > dt)) fail("sim.t_end: must exceed sim.dt");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        fail("sim.tail_fraction: must lie in (0, 1]");
    }
    if (!(tol.v_tilde_max > 0.0)) fail("tolerances.v_tilde_max: must be positive");
    if (!(tol.theta_tilde_max > 0.0)) fail("tolerances.theta_tilde_max: must be positive");
    if (!(tol.e_max > 0.0)) fail("tolerances.e_max: must be positive");
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.name == b.name && a.curve.type == b.curve.type &&
           a.curve.radius == b.curve.radius && a.curve.pitch == b.curve.pitch &&
           a.curve.origin == b.curve.origin && a.curve.direction == b.curve.direction &&
           a.curve.half_length == b.curve.half_length && a.curve.s_min == b.curve.s_min &&
           a.curve.s_max == b.curve.s_max && a.params.m == b.params.m &&
           a.params.C == b.params.C && a.params.rho == b.params.rho &&
           a.params.ell == b.params.ell && a.params.J0 == b.params.J0 &&
           a.params.Jpsi == b.params.Jpsi && a.params.g == b.params.g &&
           a.init.s == b.init.s && a.init.e1 == b.init.e1 && a.init.e2 == b.init.e2 &&
           a.init.delta_phi == b.init.delta_phi && a.init.theta == b.init.theta &&
           a.init.psi == b.init.psi && a.init.speed == b.init.speed &&
           a.init.position == b.init.position && a.init.velocity == b.init.velocity &&
           a.init.attitude == b.init.attitude && a.init.rates == b.init.rates &&
           a.reference.v_star == b.reference.v_star && a.reference.s0 == b.reference.s0 &&
           a.reference.phi_star_mode == b.reference.phi_star_mode &&
           a.reference.phi_star_value == b.reference.phi_star_value &&
           a.controller_poles == b.controller_poles &&
           a.observer_poles == b.observer_poles && a.observer_k == b.observer_k &&
           a.observer_n == b.observer_n && a.sat_l == b.sat_l && a.mode == b.mode &&
           a.dt == b.dt && a.t_end == b.t_end && a.tail_fraction == b.tail_fraction &&
           a.tol.v_tilde_max == b.tol.v_tilde_max &&
           a.tol.theta_tilde_max == b.tol.theta_tilde_max && a.tol.e_max == b.tol.e_max;
}

ScenarioConfig parse_config_text(std::string_view text, const std::string& origin) {
    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'",
                              lineno);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" +
                                  key + "'",
                              lineno);
        }
        if (!seen.insert(key).second) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                                  key + "'",
                              lineno);
        }
        try {
            it->second(cfg, value);
        } catch (const std::exception& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + key + ": " +
                                  e.what(),
                              lineno);
        }
    }
    finalize_defaults(cfg, seen);
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
    try {
        it->second(cfg, value);
    } catch (const std::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
    cfg.validate();
}

std::string canonical_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "scenario.name = " << cfg.name << "\n";
    out << "curve.type = "
        << (cfg.curve.type == CurveType::Line
                ? "line"
                : cfg.curve.type == CurveType::Circle ? "circle" : "helix")
        << "\n";
    out << "curve.radius = " << fmt_double(cfg.curve.radius) << "\n";
    out << "curve.pitch = " << fmt_double(cfg.curve.pitch) << "\n";
    out << "curve.origin = " << fmt_vec3(cfg.curve.origin) << "\n";
    out << "curve.direction = " << fmt_vec3(cfg.curve.direction) << "\n";
    out << "curve.half_length = " << fmt_double(cfg.curve.half_length) << "\n";
    if (cfg.curve.s_min) out << "curve.s_min = " << fmt_double(*cfg.curve.s_min) << "\n";
    if (cfg.curve.s_max) out << "curve.s_max = " << fmt_double(*cfg.curve.s_max) << "\n";
    out << "params.m = " << fmt_double(cfg.params.m) << "\n";
    out << "params.C = " << fmt_double(cfg.params.C) << "\n";
    out << "params.rho = " << fmt_double(cfg.params.rho) << "\n";
    out << "params.ell = " << fmt_double(cfg.params.ell) << "\n";
    out << "params.J0 = " << fmt_double(cfg.params.J0) << "\n";
    out << "params.Jpsi = " << fmt_double(cfg.params.Jpsi) << "\n";
    out << "params.g = " << fmt_double(cfg.params.g) << "\n";
    out << "init.s = " << fmt_double(cfg.init.s) << "\n";
    out << "init.e1 = " << fmt_double(cfg.init.e1) << "\n";
    out << "init.e2 = " << fmt_double(cfg.init.e2) << "\n";
    out << "init.delta_phi = " << fmt_double(cfg.init.delta_phi) << "\n";
    out << "init.theta = " << fmt_double(cfg.init.theta) << "\n";
    out << "init.psi = " << fmt_double(cfg.init.psi) << "\n";
    if (cfg.init.speed) out << "init.speed = " << fmt_double(*cfg.init.speed) << "\n";
    if (cfg.init.position) out << "init.position = " << fmt_vec3(*cfg.init.position) << "\n";
    if (cfg.init.velocity) out << "init.velocity = " << fmt_vec3(*cfg.init.velocity) << "\n";
    if (cfg.init.attitude) out << "init.attitude = " << fmt_vec3(*cfg.init.attitude) << "\n";
    if (cfg.init.rates) out << "init.rates = " << fmt_vec3(*cfg.init.rates) << "\n";
    out << "reference.v_star = " << fmt_double(cfg.reference.v_star) << "\n";
    out << "reference.s0 = " << fmt_double(cfg.reference.s0) << "\n";
    out << "reference.phi_star_mode = "
        << (cfg.reference.phi_star_mode == ReferenceSpec::PhiStarMode::FromTangent
                ? "from-tangent"
                : "constant")
        << "\n";
    out << "reference.phi_star_value = " << fmt_double(cfg.reference.phi_star_value) << "\n";
    out << "controller.mode = "
        << (cfg.mode == ControllerMode::FullState ? "state" : "output") << "\n";
    out << "controller.poles = " << fmt_poles(cfg.controller_poles) << "\n";
    out << "observer.poles = " << fmt_poles(cfg.observer_poles) << "\n";
    out << "observer.k = " << fmt_double(cfg.observer_k) << "\n";
    out << "observer.N = " << fmt_double(cfg.observer_n) << "\n";
    out << "sat.l = " << fmt_double(cfg.sat_l) << "\n";
    out << "sim.dt = " << fmt_double(cfg.dt) << "\n";
    out << "sim.t_end = " << fmt_double(cfg.t_end) << "\n";
    out << "sim.tail_fraction = " << fmt_double(cfg.tail_fraction) << "\n";
    out << "tolerances.v_tilde_max = " << fmt_double(cfg.tol.v_tilde_max) << "\n";
    out << "tolerances.theta_tilde_max = " << fmt_double(cfg.tol.theta_tilde_max) << "\n";
    out << "tolerances.e_max = " << fmt_double(cfg.tol.e_max) << "\n";
    return out.str();
}

}  // namespace ctc
