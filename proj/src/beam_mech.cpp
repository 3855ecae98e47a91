#include "magbot/beam_mech.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "magbot/errors.hpp"

namespace magbot {

std::string shape_name(Shape s) { return s == Shape::UprightU ? "upright_u" : "inverted_u"; }

Shape shape_from_name(const std::string& s) {
    if (s == "upright_u") return Shape::UprightU;
    if (s == "inverted_u") return Shape::InvertedU;
    throw std::invalid_argument("unknown shape: " + s);
}

TentacleParams TentacleParams::from_robot(const Robot& r) {
    TentacleParams p;
    const auto& g = r.geom;
    p.E = r.mat.tentacle.youngs_modulus.value_or(3.96e5);
    p.I = g.b_tent * g.t_tent * g.t_tent * g.t_tent / 12.0;
    p.M = r.mag.m_tent;
    p.l_tent = g.l_tent;
    p.A = g.b_tent * g.t_tent;
    return p;
}

void TentacleParams::validate() const {
    if (!(E > 0 && I > 0 && M > 0 && l_tent > 0 && A > 0))
        throw std::invalid_argument("tentacle parameters must be positive");
}

double TentacleDeflection::gamma_at(double x) const {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) pts.emplace_back(s[i], gamma[i]);
    return interp_clamped(pts, x);
}

std::pair<double, double> TentacleDeflection::tip_offset() const {
    // composite Simpson on the uniform grid (falls back to trapezoid for odd panels)
    const size_t n = s.size() - 1;
    if (n == 0) return {0.0, 0.0};
    const double h = s.back() / static_cast<double>(n);
    double y = 0.0, z = 0.0;
    if (n % 2 == 0) {
        for (size_t i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            y += w * std::cos(gamma[i]);
            z += w * std::sin(gamma[i]);
        }
        return {y * h / 3.0, z * h / 3.0};
    }
    for (size_t i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        y += w * std::cos(gamma[i]);
        z += w * std::sin(gamma[i]);
    }
    return {y * h, z * h};
}

double TentacleDeflection::chord() const { return 2.0 * tip_offset().first; }

namespace {

struct ShotResult {
    double g0 = 0.0;
    double dg0 = 0.0;  // d gamma(0) / d gamma_L
};

// Integrates from the free end (u = 0) to the root (u = L) for curvature constant k.
ShotResult shoot(double gl, double k, double len, int n, std::vector<double>* gam,
                 std::vector<double>* dgam) {
    using S = Eigen::Vector4d;  // gamma, gamma', d gamma/d gL, d gamma'/d gL
    auto f = [k](const S& y) {
        S d;
        d << -y[1], -k * std::cos(y[0]), -y[3], k * std::sin(y[0]) * y[2];
        return d;
    };
    const double h = len / n;
    S y(gl, 0.0, 1.0, 0.0);
    if (gam) {
        gam->assign(static_cast<size_t>(n + 1), 0.0);
        dgam->assign(static_cast<size_t>(n + 1), 0.0);
        (*gam)[n] = y[0];
        (*dgam)[n] = y[1];
    }
    for (int i = 0; i < n; ++i) {
        const S k1 = f(y);
        const S k2 = f(y + 0.5 * h * k1);
        const S k3 = f(y + 0.5 * h * k2);
        const S k4 = f(y + h * k3);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (gam) {
            (*gam)[n - 1 - i] = y[0];
            (*dgam)[n - 1 - i] = y[1];
        }
    }
    return {y[0], y[2]};
}

}  // namespace

TentacleDeflection solve_tentacle(double b_z, const TentacleParams& p, const ShootingOptions& opt) {
    if (!std::isfinite(b_z) || std::abs(b_z) > 0.1)
        throw std::invalid_argument("solve_tentacle: |b_z| must be <= 0.1 T");
    p.validate();
    if (opt.steps < 2) throw std::invalid_argument("solve_tentacle: need at least 2 steps");

    const double len = 0.5 * p.l_tent;
    const double k = p.M * std::abs(b_z) * p.A / (p.E * p.I);
    TentacleDeflection out;
    out.applied_b = b_z;
    out.shape = b_z < 0 ? Shape::UprightU : Shape::InvertedU;
    out.s.resize(static_cast<size_t>(opt.steps + 1));
    for (int i = 0; i <= opt.steps; ++i) out.s[i] = len * i / opt.steps;

    if (k == 0.0) {
        out.gamma.assign(out.s.size(), 0.0);
        out.dgamma.assign(out.s.size(), 0.0);
        return out;
    }

    // root of gamma(0; gL) on [-pi/2, 0]: positive at 0, -pi/2 at the equilibrium end
    double lo = -kPi / 2, hi = 0.0;
    double gl = 0.5 * (lo + hi);
    double res = 0.0;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const ShotResult r = shoot(gl, k, len, opt.steps, nullptr, nullptr);
        res = r.g0;
        if (std::abs(res) < opt.tolerance) break;
        if (res > 0) hi = gl; else lo = gl;
        double next = 0.5 * (lo + hi);
        if (hi - lo < 1e-3 && r.dg0 != 0.0) {
            const double newton = gl - res / r.dg0;
            if (newton > lo && newton < hi) next = newton;
        }
        if (next == gl || hi - lo < 1e-17) break;
        gl = next;
    }
    const ShotResult final_shot = shoot(gl, k, len, opt.steps, &out.gamma, &out.dgamma);
    res = final_shot.g0;
    if (!(std::abs(res) < 1e-10))
        throw SolverFailure("solve_tentacle: shooting did not converge", std::abs(res));
    out.residual = std::abs(res);
    out.iterations = it;

    // root BC is enforced exactly on output; the mismatch is reported in residual
    out.gamma[0] = 0.0;
    if (b_z < 0) {
        for (auto& g : out.gamma) g = -g;
        for (auto& d : out.dgamma) d = -d;
    }
    return out;
}

Deflection to_deflection(const TentacleDeflection& t, int n) {
    return Deflection::symmetric(n, t.s.back(), [&t](double s) { return t.gamma_at(s); });
}

InnerBeamParams InnerBeamParams::from_robot(const Robot& r) {
    InnerBeamParams p;
    p.E = r.inner_beam.youngs_modulus;
    p.I = r.inner_beam.second_moment;
    p.length = r.inner_beam.length;
    p.moment = r.mag.m_inner * r.geom.v_inner;
    return p;
}

double solve_inner_beam(double b, const InnerBeamParams& p) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("solve_inner_beam: b_func must be >= 0");
    if (!(p.E > 0 && p.I > 0 && p.length > 0 && p.moment > 0))
        throw std::invalid_argument("solve_inner_beam: parameters must be positive");
    if (b == 0.0) return 0.0;
    const double stiff = p.E * p.I / p.length;
    auto f = [&](double g) { return p.moment * b * std::sin(g + kPi / 3) - stiff * g; };
    double lo = 0.0, hi = kPi / 2;
    if (!(f(hi) < 0.0)) throw SolverFailure("solve_inner_beam: no bracket on [0, pi/2)", f(hi) / stiff);
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (f(mid) > 0) lo = mid; else hi = mid;
    }
    const double g = std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
    if (std::abs(f(g)) / stiff > 1e-12) throw SolverFailure("solve_inner_beam: residual too large", f(g) / stiff);
    return g;
}

double inner_contact_field(const InnerBeamParams& p, double gamma_contact) {
    if (!(gamma_contact > 0.0 && gamma_contact < kPi / 2))
        throw std::invalid_argument("inner_contact_field: contact angle must be in (0, pi/2)");
    // largest field with a bracket on [0, pi/2)
    const double b_max = p.E * p.I * kPi / (p.length * p.moment) * (1.0 - 1e-9);
    if (solve_inner_beam(b_max, p) < gamma_contact)
        throw SolverFailure("inner_contact_field: contact angle not reachable");
    double lo = 0.0, hi = b_max;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (solve_inner_beam(mid, p) < gamma_contact) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

CharacterizationFit characterize(const std::vector<std::pair<double, double>>& meas,
                                 const CharacterizationKnown& known) {
    if (meas.size() < 2) throw std::invalid_argument("characterize: need at least 2 measurements");
    if (known.ei.has_value() == known.m_sample.has_value())
        throw std::invalid_argument("characterize: supply exactly one of EI and M_sample");
    if (!(known.v_sample > 0 && known.l_beam > 0))
        throw std::invalid_argument("characterize: V_sample and l_beam must be positive");
    double sxy = 0.0, sxx = 0.0, ymax = 0.0;
    for (const auto& [g, b] : meas) {
        if (!(std::abs(g) < kPi / 2)) throw std::invalid_argument("characterize: |gamma| must be < pi/2");
        const double y = g / std::cos(g);
        sxy += b * y;
        sxx += b * b;
        ymax = std::max(ymax, std::abs(y));
    }
    if (sxx == 0.0) throw std::invalid_argument("characterize: all fields are zero");
    CharacterizationFit fit;
    fit.slope = sxy / sxx;
    if (!(fit.slope > 0.0)) throw std::invalid_argument("characterize: fitted slope must be positive");
    double ss = 0.0;
    for (const auto& [g, b] : meas) {
        const double e = g / std::cos(g) - fit.slope * b;
        ss += e * e;
    }
    fit.residual = ymax > 0 ? std::sqrt(ss / meas.size()) / ymax : 0.0;
    const double vl = known.v_sample * known.l_beam;
    if (known.ei) {
        fit.derived = fit.slope * *known.ei / vl;
        fit.derived_is_ei = false;
    } else {
        fit.derived = *known.m_sample * vl / fit.slope;
        fit.derived_is_ei = true;
    }
    return fit;
}

double gamma_from_slope(double slope, double b) {
    const double y = slope * b;
    const double target = std::abs(y);
    double lo = 0.0, hi = kPi / 2;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (mid / std::cos(mid) < target) lo = mid; else hi = mid;
    }
    const double g = 0.5 * (lo + hi);
    return y < 0 ? -g : g;
}

Vec3 deviation_direction(Mode mode, Shape shape, double xi) {
    if (!is_function_mode(mode)) throw std::invalid_argument("deviation_direction: needs a function mode");
    const double phi = mode_phi(mode);
    Mat3 r;
    if (shape == Shape::InvertedU)
        r = rot_axis(Axis::Z, phi - kPi / 2).matrix() * rot_axis(Axis::X, -xi).matrix();
    else
        r = rot_axis(Axis::Z, -phi + 3 * kPi / 2).matrix() * rot_axis(Axis::X, xi).matrix();
    return r * Vec3::UnitZ();
}

double interp_clamped(const std::vector<std::pair<double, double>>& s, double x) {
    if (s.empty()) return 0.0;
    if (x <= s.front().first) return s.front().second;
    if (x >= s.back().first) return s.back().second;
    auto it = std::upper_bound(s.begin(), s.end(), x,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    if (b.first == a.first) return b.second;
    const double w = (x - a.first) / (b.first - a.first);
    return a.second + w * (b.second - a.second);
}

void OpeningCurve::validate() const {
    if (samples.empty()) throw std::invalid_argument("opening curve: no samples");
    if (!(threshold_b >= 0)) throw std::invalid_argument("opening curve: negative threshold");
    for (size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].second < 0) throw std::invalid_argument("opening curve: negative opening");
        if (i > 0 && (samples[i].first <= samples[i - 1].first || samples[i].second < samples[i - 1].second))
            throw std::invalid_argument("opening curve: samples must ascend in |B| and be nondecreasing");
    }
    if (samples.front().first < threshold_b)
        throw std::invalid_argument("opening curve: sample below threshold");
}

OpeningCurve default_opening_curve(Mode mode) {
    OpeningCurve c;
    c.mode = mode;
    switch (mode) {
    case Mode::DrugDispensing: c.threshold_b = 4e-3; c.max_opening = 1.2e-3; break;
    case Mode::Cutting: c.threshold_b = 5e-3; c.max_opening = 464e-6; break;
    case Mode::GrippingStorage: c.threshold_b = 7e-3; c.max_opening = 709e-6; break;
    case Mode::Locomotion: throw std::invalid_argument("default_opening_curve: locomotion has no opening");
    }
    c.samples = {{c.threshold_b, 0.0}, {34e-3, c.max_opening}};
    return c;
}

namespace {

std::vector<std::pair<double, double>> read_two_column_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::vector<std::pair<double, double>> rows;
    bool header = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            if (line.rfind("b_mT", 0) == 0) continue;
        }
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two columns");
        try {
            rows.emplace_back(std::stod(a), std::stod(b));
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    return rows;
}

}  // namespace

OpeningCurve load_opening_curve(const std::string& path, Mode mode) {
    const auto rows = read_two_column_csv(path);
    if (rows.empty()) throw ConfigError(path + ": no data rows");
    OpeningCurve c;
    c.mode = mode;
    c.threshold_b = rows.front().first * 1e-3;
    for (const auto& [b, v] : rows) {
        c.samples.emplace_back(b * 1e-3, v * 1e-6);
        c.max_opening = std::max(c.max_opening, v * 1e-6);
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return c;
}

double opening(Mode mode, double b, const OpeningCurve& curve) {
    if (mode != curve.mode) throw std::invalid_argument("opening: curve does not match mode");
    b = std::abs(b);
    if (b < curve.threshold_b) return 0.0;
    return std::clamp(interp_clamped(curve.samples, b), 0.0, curve.max_opening);
}

DeviationTable::DeviationTable() {
    for (Mode m : {Mode::DrugDispensing, Mode::Cutting, Mode::GrippingStorage})
        for (Shape s : {Shape::InvertedU, Shape::UprightU}) set(m, s, {{0.0, 0.0}});
}

void DeviationTable::set(Mode mode, Shape shape, std::vector<std::pair<double, double>> samples) {
    std::sort(samples.begin(), samples.end());
    tables_[{static_cast<int>(mode), static_cast<int>(shape)}] = std::move(samples);
}

void DeviationTable::load(const std::string& path, Mode mode, Shape shape) {
    auto rows = read_two_column_csv(path);
    for (auto& [b, v] : rows) {
        b *= 1e-3;
        v = deg2rad(v);
    }
    set(mode, shape, std::move(rows));
}

double DeviationTable::xi(Mode mode, Shape shape, double b) const {
    auto it = tables_.find({static_cast<int>(mode), static_cast<int>(shape)});
    if (it == tables_.end()) return 0.0;
    return interp_clamped(it->second, std::abs(b));
}

}  // namespace magbot
