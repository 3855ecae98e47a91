#include "magbot/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "magbot/errors.hpp"

namespace magbot {

using nlohmann::json;

namespace {

std::string where(const std::string& ctx) { return ctx.empty() ? "config" : ctx; }

void allow_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where(ctx) + ": expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(where(ctx) + ": unknown key '" + it.key() + "'");
}

double get_num(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
    return j.get<double>();
}

void opt_num(const json& j, const char* key, double& dst, const std::string& ctx) {
    if (j.contains(key)) dst = get_num(j.at(key), ctx + "." + key);
}

void opt_int(const json& j, const char* key, int& dst, const std::string& ctx) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(ctx + "." + key + ": expected an integer");
    dst = v.get<int>();
}

void opt_bool(const json& j, const char* key, bool& dst, const std::string& ctx) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_boolean()) throw ConfigError(ctx + "." + key + ": expected true/false");
    dst = j.at(key).get<bool>();
}

std::string get_str(const json& j, const std::string& ctx) {
    if (!j.is_string()) throw ConfigError(ctx + ": expected a string");
    return j.get<std::string>();
}

template <class F>
auto translate(const std::string& ctx, F&& f, int step = -1) -> decltype(f()) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ctx + ": " + e.what(), step);
    }
}

void parse_material(const json& j, MaterialSpec& m, const std::string& ctx) {
    allow_keys(j, ctx, {"E", "hci", "m", "m_demag"});
    if (j.contains("E")) m.youngs_modulus = get_num(j.at("E"), ctx + ".E");
    if (j.contains("hci")) m.coercivity_hci = get_num(j.at("hci"), ctx + ".hci");
    opt_num(j, "m", m.m_magnetized, ctx);
    if (j.contains("m_demag")) m.m_demagnetized = get_num(j.at("m_demag"), ctx + ".m_demag");
}

void parse_robot(const json& j, Robot& r) {
    const std::string ctx = "robot";
    allow_keys(j, ctx, {"geometry", "materials", "inner_beam", "mass_kg", "n_segments", "com"});
    opt_num(j, "mass_kg", r.mass_kg, ctx);
    opt_int(j, "n_segments", r.n_segments, ctx);
    if (r.n_segments < 2) throw ConfigError("robot.n_segments must be >= 2");
    if (j.contains("com")) {
        const json& c = j.at("com");
        if (!c.is_array() || c.size() != 3) throw ConfigError("robot.com: expected [x, y, z]");
        r.com_override = Vec3(get_num(c[0], "robot.com"), get_num(c[1], "robot.com"), get_num(c[2], "robot.com"));
    }
    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        const std::string gc = "robot.geometry";
        allow_keys(g, gc, {"z_tent", "t_tent", "b_tent", "l_tent", "z_six", "y_six1", "y_six2", "v_six", "z_main",
                           "x_inner", "y_inner", "v_inner", "z_rprog", "v_rprog", "z_heat", "v_heat"});
        Geometry& G = r.geom;
        opt_num(g, "z_tent", G.z_tent, gc);
        opt_num(g, "t_tent", G.t_tent, gc);
        opt_num(g, "b_tent", G.b_tent, gc);
        opt_num(g, "l_tent", G.l_tent, gc);
        opt_num(g, "z_six", G.z_six, gc);
        opt_num(g, "y_six1", G.y_six1, gc);
        opt_num(g, "y_six2", G.y_six2, gc);
        opt_num(g, "v_six", G.v_six, gc);
        opt_num(g, "z_main", G.z_main, gc);
        opt_num(g, "v_inner", G.v_inner, gc);
        opt_num(g, "z_rprog", G.z_rprog, gc);
        opt_num(g, "v_rprog", G.v_rprog, gc);
        opt_num(g, "z_heat", G.z_heat, gc);
        opt_num(g, "v_heat", G.v_heat, gc);
        for (const char* key : {"x_inner", "y_inner"}) {
            if (!g.contains(key)) continue;
            const json& a = g.at(key);
            if (!a.is_array() || a.size() != 3) throw ConfigError(gc + "." + key + ": expected 3 numbers");
            auto& dst = std::string(key) == "x_inner" ? G.x_inner : G.y_inner;
            for (int i = 0; i < 3; ++i) dst[i] = get_num(a[i], gc + "." + key);
        }
        translate(gc, [&] { G.validate(); });
    }
    if (j.contains("materials")) {
        const json& m = j.at("materials");
        allow_keys(m, "robot.materials", {"heat", "body", "inner", "rprog", "sixth", "tentacle"});
        Materials& M = r.mat;
        const std::pair<const char*, MaterialSpec*> all[] = {{"heat", &M.heat},   {"body", &M.body},
                                                             {"inner", &M.inner}, {"rprog", &M.rprog},
                                                             {"sixth", &M.sixth}, {"tentacle", &M.tentacle}};
        for (const auto& [key, spec] : all)
            if (m.contains(key)) parse_material(m.at(key), *spec, std::string("robot.materials.") + key);
        translate("robot.materials", [&] { M.validate(); });
        r.mag.m_tent = M.tentacle.m_magnetized;
        r.mag.m_six = M.sixth.m_magnetized;
        r.mag.m_inner = M.inner.m_magnetized;
        r.mag.m_rprog = r.mag.programmable_magnetized ? M.rprog.m_magnetized : M.rprog.m_demagnetized.value_or(0.0);
        r.mag.m_heat = r.mag.programmable_magnetized ? M.heat.m_magnetized : M.heat.m_demagnetized.value_or(0.0);
    }
    if (j.contains("inner_beam")) {
        const json& b = j.at("inner_beam");
        const std::string bc = "robot.inner_beam";
        allow_keys(b, bc, {"E", "I", "length", "gamma_contact"});
        opt_num(b, "E", r.inner_beam.youngs_modulus, bc);
        opt_num(b, "I", r.inner_beam.second_moment, bc);
        opt_num(b, "length", r.inner_beam.length, bc);
        opt_num(b, "gamma_contact", r.inner_beam.gamma_contact, bc);
    }
}

void parse_scaling(const json& j, ScalePlan& plan, CapacityData& d) {
    const std::string ctx = "scaling";
    allow_keys(j, ctx, {"lambda_body", "lambda_tent", "lambda_width", "capacity"});
    opt_num(j, "lambda_body", plan.lambda_body, ctx);
    opt_num(j, "lambda_tent", plan.lambda_tent, ctx);
    if (j.contains("lambda_width")) plan.lambda_width = get_num(j.at("lambda_width"), ctx + ".lambda_width");
    translate(ctx, [&] { plan.validate(); });
    if (j.contains("capacity")) {
        const json& c = j.at("capacity");
        const std::string cc = "scaling.capacity";
        allow_keys(c, cc, {"drug_volume", "sample_volume", "cutter_area", "drug_required", "sample_required",
                           "tool_area"});
        opt_num(c, "drug_volume", d.drug_volume, cc);
        opt_num(c, "sample_volume", d.sample_volume, cc);
        opt_num(c, "cutter_area", d.cutter_area, cc);
        opt_num(c, "drug_required", d.drug_required, cc);
        opt_num(c, "sample_required", d.sample_required, cc);
        opt_num(c, "tool_area", d.tool_area, cc);
    }
}

void parse_gait(const json& j, GaitConfig& g) {
    const std::string ctx = "gait";
    allow_keys(j, ctx, {"samples_per_period", "k2", "circumference_length", "circumference_width",
                        "max_roll_frequency", "max_crawl_frequency", "crawl_stride", "stride_source", "crawl_b_high",
                        "crawl_b_low", "crawl_tilt_deg", "crawl_phase_fractions", "spin_samples_per_step", "step_out",
                        "coil_b_max", "coil_grad_max"});
    opt_int(j, "samples_per_period", g.samples_per_period, ctx);
    opt_num(j, "k2", g.k2, ctx);
    opt_num(j, "circumference_length", g.circumference_length, ctx);
    opt_num(j, "circumference_width", g.circumference_width, ctx);
    opt_num(j, "max_roll_frequency", g.max_roll_frequency, ctx);
    opt_num(j, "max_crawl_frequency", g.max_crawl_frequency, ctx);
    opt_num(j, "crawl_stride", g.crawl_stride, ctx);
    if (j.contains("stride_source")) {
        const std::string s = get_str(j.at("stride_source"), ctx + ".stride_source");
        if (s == "calibrated") g.stride_source = StrideSource::Calibrated;
        else if (s == "geometry") g.stride_source = StrideSource::Geometry;
        else throw ConfigError(ctx + ".stride_source: expected calibrated or geometry");
    }
    opt_num(j, "crawl_b_high", g.crawl_b_high, ctx);
    opt_num(j, "crawl_b_low", g.crawl_b_low, ctx);
    if (j.contains("crawl_tilt_deg")) g.crawl_tilt = deg2rad(get_num(j.at("crawl_tilt_deg"), ctx + ".crawl_tilt_deg"));
    if (j.contains("crawl_phase_fractions")) {
        const json& a = j.at("crawl_phase_fractions");
        if (!a.is_array() || a.size() != 5) throw ConfigError(ctx + ".crawl_phase_fractions: expected 5 numbers");
        for (int i = 0; i < 5; ++i) g.crawl_phase_fractions[i] = get_num(a[i], ctx + ".crawl_phase_fractions");
    }
    opt_int(j, "spin_samples_per_step", g.spin_samples_per_step, ctx);
    if (j.contains("step_out")) {
        const json& a = j.at("step_out");
        if (!a.is_array() || a.size() != 3) throw ConfigError(ctx + ".step_out: expected 3 numbers");
        for (int i = 0; i < 3; ++i) g.step_out[i] = get_num(a[i], ctx + ".step_out");
    }
    opt_num(j, "coil_b_max", g.coil.b_max, ctx);
    opt_num(j, "coil_grad_max", g.coil.grad_max, ctx);
    translate(ctx, [&] { g.validate(); });
}

void parse_reprogram(const json& j, ReprogramParams& p) {
    const std::string ctx = "reprogram";
    allow_keys(j, ctx, {"b_mag", "k_ramp", "pulse", "b_demag", "k_demag", "f_demag", "r_coil", "l_coil"});
    opt_num(j, "b_mag", p.b_mag, ctx);
    opt_num(j, "k_ramp", p.k_ramp, ctx);
    opt_num(j, "pulse", p.pulse, ctx);
    opt_num(j, "b_demag", p.b_demag, ctx);
    opt_num(j, "k_demag", p.k_demag, ctx);
    opt_num(j, "f_demag", p.f_demag, ctx);
    opt_num(j, "r_coil", p.r_coil, ctx);
    opt_num(j, "l_coil", p.l_coil, ctx);
    for (double v : {p.b_mag, p.k_ramp, p.pulse, p.b_demag, p.k_demag, p.f_demag, p.r_coil, p.l_coil})
        if (!(v > 0.0)) throw ConfigError(ctx + ": parameters must be > 0");
}

void parse_thermal(const json& j, ThermalState& t) {
    const std::string ctx = "thermal";
    allow_keys(j, ctx, {"temperature", "mass", "specific_heat", "heat_power", "ambient", "tau_cool"});
    opt_num(j, "temperature", t.temperature, ctx);
    opt_num(j, "mass", t.mass, ctx);
    opt_num(j, "specific_heat", t.specific_heat, ctx);
    opt_num(j, "heat_power", t.heat_power, ctx);
    opt_num(j, "ambient", t.ambient, ctx);
    opt_num(j, "tau_cool", t.tau_cool, ctx);
    if (!(t.mass > 0 && t.specific_heat > 0 && t.tau_cool > 0 && t.heat_power >= 0))
        throw ConfigError(ctx + ": mass, specific_heat and tau_cool must be > 0");
}

void parse_environment(const json& j, Scenario& sc) {
    if (j.is_string()) {
        sc.env_name = j.get<std::string>();
        sc.env = translate("environment", [&] { return SimEnv::preset(sc.env_name); });
        return;
    }
    allow_keys(j, "environment", {"preset", "slip_factor", "gravity", "substrate_z"});
    if (j.contains("preset")) {
        sc.env_name = get_str(j.at("preset"), "environment.preset");
        sc.env = translate("environment", [&] { return SimEnv::preset(sc.env_name); });
    }
    if (j.contains("slip_factor")) {
        sc.env.slip_factor = get_num(j.at("slip_factor"), "environment.slip_factor");
        sc.env_name = "custom";
    }
    opt_bool(j, "gravity", sc.env.gravity, "environment");
    opt_num(j, "substrate_z", sc.env.substrate_z, "environment");
    translate("environment", [&] { sc.env.validate(); });
}

Mode parse_mode(const json& j, const std::string& ctx, int step) {
    const std::string s = get_str(j, ctx);
    return translate(ctx, [&] { return mode_from_name(s); }, step);
}

SteerProfile parse_steer(const json& j, const std::string& ctx) {
    if (j.is_number()) return SteerProfile::constant(deg2rad(j.get<double>()));
    if (!j.is_array()) throw ConfigError(ctx + ": expected degrees or [[t_s, deg], ...]");
    SteerProfile p;
    double last = -1e300;
    for (const auto& pt : j) {
        if (!pt.is_array() || pt.size() != 2) throw ConfigError(ctx + ": expected [t_s, deg] pairs");
        const double t = get_num(pt[0], ctx), a = get_num(pt[1], ctx);
        if (!(t > last)) throw ConfigError(ctx + ": times must increase");
        last = t;
        p.points.emplace_back(t, deg2rad(a));
    }
    return p;
}

Step parse_step(const json& j, int i) {
    const std::string ctx = "steps[" + std::to_string(i) + "]";
    auto err = [&](const std::string& m) { return ConfigError(ctx + ": " + m, i); };
    if (!j.is_object() || !j.contains("type")) throw err("expected an object with a type");
    const std::string type = get_str(j.at("type"), ctx + ".type");
    Step s;
    auto num = [&](const char* key, double scale, bool required, double& dst) {
        if (!j.contains(key)) {
            if (required) throw err(std::string("missing '") + key + "'");
            return;
        }
        if (!j.at(key).is_number()) throw err(std::string("'") + key + "' must be a number");
        dst = j.at(key).get<double>() * scale;
    };
    auto integer = [&](const char* key, int& dst) {
        if (!j.contains(key)) throw err(std::string("missing '") + key + "'");
        if (!j.at(key).is_number_integer()) throw err(std::string("'") + key + "' must be an integer");
        dst = j.at(key).get<int>();
    };
    try {
        if (type == "set_mode") {
            allow_keys(j, ctx, {"type", "mode", "phi_deg", "demagnetize", "method"});
            s.type = StepType::SetMode;
            opt_bool(j, "demagnetize", s.demagnetize, ctx);
            if (j.contains("mode")) {
                const Mode m = parse_mode(j.at("mode"), ctx + ".mode", i);
                if (m == Mode::Locomotion) s.demagnetize = true;
                else s.phi = mode_phi(m);
            }
            if (j.contains("phi_deg")) s.phi = deg2rad(get_num(j.at("phi_deg"), ctx + ".phi_deg"));
            if (!s.demagnetize && !j.contains("mode") && !j.contains("phi_deg"))
                throw err("set_mode needs mode, phi_deg or demagnetize");
            if (j.contains("method")) {
                const std::string m = get_str(j.at("method"), ctx + ".method");
                if (m == "ramp") s.method = ReprogramKind::RampMagnetize;
                else if (m == "step") s.method = ReprogramKind::StepMagnetize;
                else throw err("method must be ramp or step");
            }
        } else if (type == "gait") {
            allow_keys(j, ctx, {"type", "gait", "b_mT", "f_Hz", "duration_s", "cycles", "steps", "mode", "steer_deg"});
            s.type = StepType::Gait;
            const std::string g = get_str(j.at("gait"), ctx + ".gait");
            s.gait = translate(ctx, [&] { return gait_kind_from_name(g); }, i);
            if (j.contains("steer_deg")) s.steer = parse_steer(j.at("steer_deg"), ctx + ".steer_deg");
            switch (s.gait) {
            case GaitKind::RollLength:
            case GaitKind::RollWidth:
                num("b_mT", 1e-3, true, s.b);
                num("f_Hz", 1.0, true, s.frequency);
                num("duration_s", 1.0, true, s.duration);
                break;
            case GaitKind::TwoAnchorCrawl:
                integer("cycles", s.cycles);
                num("f_Hz", 1.0, true, s.frequency);
                break;
            case GaitKind::SpinWalk:
                integer("steps", s.cycles);
                num("b_mT", 1e-3, true, s.b);
                num("f_Hz", 1.0, true, s.frequency);
                if (j.contains("mode")) s.mode = parse_mode(j.at("mode"), ctx + ".mode", i);
                break;
            }
        } else if (type == "function") {
            allow_keys(j, ctx, {"type", "mode", "b_mT", "duration_s"});
            s.type = StepType::Function;
            if (!j.contains("mode")) throw err("missing 'mode'");
            s.mode = parse_mode(j.at("mode"), ctx + ".mode", i);
            num("b_mT", 1e-3, true, s.b);
            num("duration_s", 1.0, true, s.duration);
        } else if (type == "heat" || type == "wait") {
            allow_keys(j, ctx, {"type", "duration_s"});
            s.type = type == "heat" ? StepType::Heat : StepType::Wait;
            num("duration_s", 1.0, true, s.duration);
        } else {
            throw err("unknown step type '" + type + "'");
        }
    } catch (const ConfigError& e) {
        if (e.step_index() >= 0) throw;
        throw ConfigError(e.what(), i);
    } catch (const json::exception& e) {
        throw err(e.what());
    }
    return s;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
    const json j = parse_json(text);
    allow_keys(j, "", {"robot", "gait", "reprogram", "thermal", "environment", "opening_curves", "sampling",
                       "scaling", "steps", "description"});
    Scenario sc;
    if (j.contains("robot")) parse_robot(j.at("robot"), sc.robot);
    if (j.contains("gait")) parse_gait(j.at("gait"), sc.gait);
    if (j.contains("reprogram")) parse_reprogram(j.at("reprogram"), sc.reprogram);
    if (j.contains("thermal")) parse_thermal(j.at("thermal"), sc.thermal);
    if (j.contains("environment")) parse_environment(j.at("environment"), sc);
    if (j.contains("sampling")) {
        const json& s = j.at("sampling");
        allow_keys(s, "sampling", {"reprogram_dt", "function_fine_dt", "function_coarse_dt", "heat_dt"});
        opt_num(s, "reprogram_dt", sc.reprogram_dt, "sampling");
        opt_num(s, "function_fine_dt", sc.function_fine_dt, "sampling");
        opt_num(s, "function_coarse_dt", sc.function_coarse_dt, "sampling");
        opt_num(s, "heat_dt", sc.heat_dt, "sampling");
    }
    if (j.contains("opening_curves")) {
        const json& c = j.at("opening_curves");
        if (!c.is_object()) throw ConfigError("opening_curves: expected an object");
        for (auto it = c.begin(); it != c.end(); ++it) {
            const Mode m = translate("opening_curves", [&] { return mode_from_name(it.key()); });
            if (!is_function_mode(m)) throw ConfigError("opening_curves: locomotion has no opening curve");
            std::filesystem::path p = get_str(it.value(), "opening_curves." + it.key());
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            sc.curves[m] = translate("opening_curves", [&] { return load_opening_curve(p.string(), m); });
        }
    }
    if (j.contains("steps")) {
        const json& st = j.at("steps");
        if (!st.is_array()) throw ConfigError("steps: expected an array");
        for (size_t i = 0; i < st.size(); ++i) sc.steps.push_back(parse_step(st[i], static_cast<int>(i)));
    }
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    const std::string text = read_file(path);
    const std::string base = std::filesystem::path(path).parent_path().string();
    return parse_scenario(text, base.empty() ? "." : base);
}

Robot parse_robot_section(const std::string& text) {
    const json j = parse_json(text);
    Robot r = default_robot();
    if (j.contains("robot")) parse_robot(j.at("robot"), r);
    return r;
}

void parse_scaling_section(const std::string& text, ScalePlan& plan, CapacityData& data) {
    const json j = parse_json(text);
    if (j.contains("scaling")) parse_scaling(j.at("scaling"), plan, data);
}

}  // namespace magbot
