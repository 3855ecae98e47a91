#include "magbot/robot_model.hpp"

#include <cmath>
#include <stdexcept>

namespace magbot {

std::string mode_name(Mode m) {
    switch (m) {
    case Mode::Locomotion: return "locomotion";
    case Mode::DrugDispensing: return "drug_dispensing";
    case Mode::Cutting: return "cutting";
    case Mode::GrippingStorage: return "gripping_storage";
    }
    return "locomotion";
}

Mode mode_from_name(const std::string& s) {
    if (s == "locomotion") return Mode::Locomotion;
    if (s == "drug_dispensing") return Mode::DrugDispensing;
    if (s == "cutting") return Mode::Cutting;
    if (s == "gripping_storage") return Mode::GrippingStorage;
    throw std::invalid_argument("unknown mode: " + s);
}

bool is_function_mode(Mode m) { return m != Mode::Locomotion; }

double mode_phi(Mode m) {
    switch (m) {
    case Mode::DrugDispensing: return deg2rad(90.0);
    case Mode::Cutting: return deg2rad(330.0);
    case Mode::GrippingStorage: return deg2rad(210.0);
    case Mode::Locomotion: break;
    }
    throw std::invalid_argument("mode_phi: locomotion has no programming angle");
}

Mode mode_from_phi(double phi) {
    for (Mode m : {Mode::DrugDispensing, Mode::Cutting, Mode::GrippingStorage}) {
        const double d = std::remainder(phi - mode_phi(m), 2 * kPi);
        if (std::abs(d) < 1e-6) return m;
    }
    throw std::invalid_argument("mode_from_phi: angle does not select a function mode");
}

void MaterialSpec::validate() const {
    if (m_magnetized < 0.0) throw std::invalid_argument(name + ": negative magnetization");
    if (youngs_modulus && *youngs_modulus <= 0.0)
        throw std::invalid_argument(name + ": Young's modulus must be positive");
    if (coercivity_hci && *coercivity_hci <= 0.0)
        throw std::invalid_argument(name + ": coercivity must be positive");
    if (m_demagnetized) {
        if (*m_demagnetized < 0.0 || *m_demagnetized >= m_magnetized)
            throw std::invalid_argument(name + ": demagnetized value must be below magnetized value");
    }
}

void Materials::validate() const {
    for (const MaterialSpec* m : {&heat, &body, &inner, &rprog, &sixth, &tentacle}) m->validate();
    if (!tentacle.youngs_modulus) throw std::invalid_argument("tentacle material needs a Young's modulus");
    if (!tentacle.magnetic() || !inner.magnetic() || !sixth.magnetic())
        throw std::invalid_argument("hard components must be magnetic");
}

double Materials::min_hard_coercivity() const {
    double h = INFINITY;
    for (const MaterialSpec* m : {&inner, &sixth, &tentacle})
        if (m->coercivity_hci) h = std::min(h, *m->coercivity_hci);
    return h;
}

Materials default_materials() {
    Materials m;
    m.heat = {"heat_fe3o4", std::nullopt, std::nullopt, 6.52e3, 0.766e3};
    m.body = {"main_body", 5.70e5, std::nullopt, 0.0, std::nullopt};
    m.inner = {"inner_ndfeb", std::nullopt, 0.598, 108e3, std::nullopt};
    m.rprog = {"rprog_alnico", std::nullopt, std::nullopt, 7.18e3, 1.19e3};
    m.sixth = {"sixth_dof", std::nullopt, 0.614, 88.7e3, std::nullopt};
    m.tentacle = {"soft_tentacle", 3.96e5, 0.0933, 37.5e3, std::nullopt};
    return m;
}

void Geometry::validate() const {
    for (double v : {t_tent, b_tent, l_tent, v_six, v_inner, v_rprog, v_heat})
        if (!(v > 0.0)) throw std::invalid_argument("geometry: sizes and volumes must be positive");
    if (std::abs(y_six1 + y_six2) > 1e-12)
        throw std::invalid_argument("geometry: sixth-DOF centroids must be mirror-symmetric");
}

Robot default_robot() {
    Robot r;
    r.mat = default_materials();
    r.mag.m_tent = r.mat.tentacle.m_magnetized;
    r.mag.m_six = r.mat.sixth.m_magnetized;
    r.mag.m_inner = r.mat.inner.m_magnetized;
    r.mag.m_rprog = *r.mat.rprog.m_demagnetized;
    r.mag.m_heat = *r.mat.heat.m_demagnetized;
    r.inner_beam.youngs_modulus = *r.mat.body.youngs_modulus;
    return r;
}

Deflection Deflection::none(int n) { return uniform(n, 0.0); }

Deflection Deflection::uniform(int n, double gamma) {
    Deflection d;
    d.gamma_right.assign(static_cast<size_t>(n), gamma);
    d.gamma_left.assign(static_cast<size_t>(n), gamma);
    return d;
}

Deflection Deflection::symmetric(int n, double half_length,
                                 const std::function<double(double)>& gamma_of_s) {
    Deflection d;
    const double ds = half_length / n;
    for (int i = 0; i < n; ++i) d.gamma_right.push_back(gamma_of_s((i + 0.5) * ds));
    d.gamma_left = d.gamma_right;
    return d;
}

std::array<Vec3, 3> inner_directions(const Geometry& geom) {
    // directions of the three inner magnets; each is paired with the position it points away from
    const std::array<Vec3, 3> dirs{Vec3(std::sqrt(3.0) / 2, -0.5, 0), Vec3(0, 1, 0),
                                   Vec3(-std::sqrt(3.0) / 2, -0.5, 0)};
    std::array<Vec3, 3> out;
    for (int j = 0; j < 3; ++j) {
        const Vec3 p(geom.x_inner[j], geom.y_inner[j], 0.0);
        double best = -INFINITY;
        for (const Vec3& d : dirs) {
            const double score = -p.dot(d);
            if (score > best) {
                best = score;
                out[j] = d;
            }
        }
    }
    return out;
}

namespace {

void check_options(const ProfileOptions& opt) {
    if (opt.n_segments < 1) throw std::invalid_argument("profile: n_segments must be >= 1");
}

void append_rigid(DipoleList& out, const MagnetizationState& s, const Geometry& g,
                  const std::array<double, 3>& inner_rot, const ProfileOptions& opt) {
    const double m_half = s.m_six * g.v_six / 2;
    out.push_back({Vec3(0, g.y_six1, g.z_six), Vec3(0, m_half, 0), g.v_six / 2, "six"});
    out.push_back({Vec3(0, g.y_six2, g.z_six), Vec3(0, -m_half, 0), g.v_six / 2, "six"});

    const auto dirs = inner_directions(g);
    for (int j = 0; j < 3; ++j) {
        const Vec3 m = rot_axis(Axis::Z, inner_rot[j]).matrix() * (s.m_inner * g.v_inner * dirs[j]);
        out.push_back({Vec3(g.x_inner[j], g.y_inner[j], g.z_main), m, g.v_inner, "inner"});
    }

    const bool on = s.programmable_magnetized || opt.include_residual;
    const double phi = s.programmable_magnetized ? s.phi : 0.0;
    const Vec3 u(std::cos(phi), std::sin(phi), 0.0);
    out.push_back({Vec3(0, 0, g.z_rprog), on ? Vec3(s.m_rprog * g.v_rprog * u) : Vec3::Zero(),
                   g.v_rprog, "rprog"});
    out.push_back({Vec3(0, 0, g.z_heat), on ? Vec3(s.m_heat * g.v_heat * u) : Vec3::Zero(),
                   g.v_heat, "heat"});
}

}  // namespace

DipoleList profile_moments(const MagnetizationState& state, const Geometry& geom,
                           const ProfileOptions& opt) {
    check_options(opt);
    return deformed_profile(state, geom, Deflection::none(opt.n_segments), opt);
}

DipoleList deformed_profile(const MagnetizationState& state, const Geometry& geom,
                            const Deflection& def, const ProfileOptions& opt) {
    check_options(opt);
    const int n = opt.n_segments;
    if (static_cast<int>(def.gamma_right.size()) != n || static_cast<int>(def.gamma_left.size()) != n)
        throw std::invalid_argument("deflection discretization does not match n_segments");

    DipoleList out;
    out.reserve(static_cast<size_t>(2 * n + 7));
    const double ds = 0.5 * geom.l_tent / n;
    const double area = geom.b_tent * geom.t_tent;
    const double dm = state.m_tent * area * ds;
    const double zc = geom.tentacle_centre_z();

    for (int half = 0; half < 2; ++half) {
        const auto& gam = half == 0 ? def.gamma_right : def.gamma_left;
        const double side = half == 0 ? 1.0 : -1.0;
        double y = 0.0, z = zc;
        for (int i = 0; i < n; ++i) {
            const double c = std::cos(gam[i]), s = std::sin(gam[i]);
            const Vec3 pos(0.0, side * (y + 0.5 * ds * c), z + 0.5 * ds * s);
            // magnetization points inward along the undeformed strip, rotated with the material
            const Vec3 m(0.0, -side * dm * c, -dm * s);
            out.push_back({pos, m, area * ds, half == 0 ? "tentacle_r" : "tentacle_l"});
            y += ds * c;
            z += ds * s;
        }
    }
    append_rigid(out, state, geom, def.inner, opt);
    return out;
}

Vec3 moment_sum(const DipoleList& d) {
    Vec3 s = Vec3::Zero();
    for (const auto& x : d) s += x.m;
    return s;
}

Vec3 net_moment(const MagnetizationState& state, const Geometry& geom, const Deflection& def,
                const ProfileOptions& opt) {
    return moment_sum(deformed_profile(state, geom, def, opt));
}

Vec3 centre_of_mass(const Geometry& g) {
    double v = 0.0;
    Vec3 acc = Vec3::Zero();
    auto add = [&](const Vec3& r, double vol) {
        acc += vol * r;
        v += vol;
    };
    add(Vec3(0, 0, g.tentacle_centre_z()), g.tentacle_volume());
    add(Vec3(0, g.y_six1, g.z_six), g.v_six / 2);
    add(Vec3(0, g.y_six2, g.z_six), g.v_six / 2);
    for (int j = 0; j < 3; ++j) add(Vec3(g.x_inner[j], g.y_inner[j], g.z_main), g.v_inner);
    add(Vec3(0, 0, g.z_rprog), g.v_rprog);
    add(Vec3(0, 0, g.z_heat), g.v_heat);
    return acc / v;
}

Mat3 local_frame(const Vec3& m) {
    const double n = m.norm();
    if (!(n > 0.0)) return Mat3::Identity();
    const Vec3 u = m / n;
    const Vec3 ez = Vec3::UnitZ();
    if (u.cross(ez).norm() < 1e-9) {
        if (u.z() > 0) return Mat3::Identity();
        return rot_axis(Axis::Y, kPi).matrix();
    }
    const Vec3 y = (ez - ez.dot(u) * u).normalized();
    const Vec3 x = y.cross(u);
    Mat3 a;
    a << x, y, u;
    return a;
}

DipoleList to_local(const DipoleList& d, const Vec3& origin, const Mat3& axes) {
    DipoleList out = d;
    const Mat3 rt = axes.transpose();
    for (auto& x : out) {
        x.r = rt * (x.r - origin);
        x.m = rt * x.m;
    }
    return out;
}

std::array<double, 3> inner_deflections_for(Mode mode, double gamma, const Geometry& geom) {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (!is_function_mode(mode)) return out;
    const double phi = mode_phi(mode);
    const Vec3 u(std::cos(phi), std::sin(phi), 0.0);
    const auto dirs = inner_directions(geom);
    for (int j = 0; j < 3; ++j) {
        const double delta = std::atan2(dirs[j].cross(u).z(), dirs[j].dot(u));
        if (std::abs(delta) > 1e-6) out[j] = delta > 0 ? gamma : -gamma;
    }
    return out;
}

}  // namespace magbot
