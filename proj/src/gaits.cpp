#include "magbot/gaits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "magbot/errors.hpp"

namespace magbot {

std::string gait_kind_name(GaitKind k) {
    switch (k) {
    case GaitKind::RollLength: return "roll_length";
    case GaitKind::RollWidth: return "roll_width";
    case GaitKind::TwoAnchorCrawl: return "crawl";
    case GaitKind::SpinWalk: return "spin_walk";
    }
    return "roll_length";
}

GaitKind gait_kind_from_name(const std::string& s) {
    for (GaitKind k : {GaitKind::RollLength, GaitKind::RollWidth, GaitKind::TwoAnchorCrawl, GaitKind::SpinWalk})
        if (gait_kind_name(k) == s) return k;
    throw std::invalid_argument("unknown gait '" + s + "'");
}

double SteerProfile::at(double t) const {
    if (points.empty()) return 0.0;
    return interp_clamped(points, t);
}

void GaitConfig::validate() const {
    if (samples_per_period < 4) throw std::invalid_argument("gait config: samples_per_period must be >= 4");
    if (spin_samples_per_step < 1) throw std::invalid_argument("gait config: spin_samples_per_step must be >= 1");
    if (!(k2 >= 0.0)) throw std::invalid_argument("gait config: k2 must be >= 0");
    if (!(circumference_length > 0.0) || !(circumference_width > 0.0))
        throw std::invalid_argument("gait config: circumferences must be > 0");
    if (!(crawl_b_low > 0.0) || !(crawl_b_high > 0.0)) throw std::invalid_argument("gait config: crawl fields must be > 0");
    if (!(crawl_stride >= 0.0)) throw std::invalid_argument("gait config: crawl stride must be >= 0");
    double sum = 0.0;
    for (double f : crawl_phase_fractions) {
        if (!(f > 0.0)) throw std::invalid_argument("gait config: crawl phase fractions must be > 0");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("gait config: crawl phase fractions must sum to 1");
    for (double w : step_out)
        if (!(w > 0.0)) throw std::invalid_argument("gait config: step-out limits must be > 0");
}

namespace {

Mat3 rz(double a) { return rot_axis(Axis::Z, a).matrix(); }
Mat3 rx(double a) { return rot_axis(Axis::X, a).matrix(); }
Mat3 ry(double a) { return rot_axis(Axis::Y, a).matrix(); }

void check_b(double b, const GaitConfig& cfg) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("gait: field magnitude must be >= 0");
    if (b > cfg.coil.b_max) throw std::invalid_argument("gait: field magnitude exceeds the coil capacity");
}

// Field solves for one gait. Design matrices are cached per field magnitude.
class FieldSolver {
public:
    FieldSolver(const Robot& robot, const GaitConfig& cfg) : robot_(robot), cfg_(cfg) {}

    FieldState at(const PlanSample& k) {
        if (k.b_magnitude == 0.0) return FieldState{};
        const DesignMatrix& d = design(k.b_magnitude);
        const FieldState fi = solve_fields(d, k.theta, Vec3::Zero(), k.b_magnitude, cfg_.k2);
        const Mat3 r_int = k.orientation * rz(k.theta).transpose();
        return rotate_field(r_int, fi, Frame::Global);
    }

private:
    const DesignMatrix& design(double b) {
        auto it = cache_.find(b);
        if (it != cache_.end()) return it->second;
        ActuationModel am = build_actuation(robot_, b, Shape::InvertedU);
        return cache_.emplace(b, am.design).first->second;
    }

    const Robot& robot_;
    const GaitConfig& cfg_;
    std::map<double, DesignMatrix> cache_;
};

Waveform render(const std::vector<PlanSample>& keys, const Robot& robot, const GaitConfig& cfg,
                const std::string& tag) {
    Waveform w;
    w.category = "I";
    FieldSolver solver(robot, cfg);
    for (size_t i = 0; i + 1 < keys.size(); ++i) {
        WaveformSample s;
        s.t = keys[i].t;
        s.fs = solver.at(keys[i]);
        s.tag = tag;
        w.samples.push_back(std::move(s));
    }
    const long bad = first_coil_violation(w, cfg.coil);
    if (bad >= 0)
        throw std::invalid_argument("gait: sample " + std::to_string(bad) + " exceeds the coil limits");
    return w;
}

long sample_count(double duration, double dt) { return std::lround(duration / dt); }

}  // namespace

GaitPlan plan_roll(RollAxis axis, double b, double f_roll, double duration, const SteerProfile& steer,
                   const Robot& robot, const GaitConfig& cfg) {
    cfg.validate();
    check_b(b, cfg);
    if (!(f_roll >= 0.0) || f_roll > cfg.max_roll_frequency)
        throw std::invalid_argument("plan_roll: frequency outside [0, " + format_sig9(cfg.max_roll_frequency) + "] Hz");
    if (!(duration >= 0.0) || !std::isfinite(duration)) throw std::invalid_argument("plan_roll: duration must be >= 0");

    GaitPlan p;
    p.kind = axis == RollAxis::Length ? GaitKind::RollLength : GaitKind::RollWidth;
    p.mode = robot.mag.mode;
    p.b_magnitude = b;
    p.frequency = f_roll;
    p.steer = steer;
    // a stationary field is sampled as if at 1 Hz
    const double dt = 1.0 / (cfg.samples_per_period * (f_roll > 0.0 ? f_roll : 1.0));
    const long n = sample_count(duration, dt);
    p.cycles = static_cast<int>(std::floor(f_roll * n * dt + 1e-9));
    const double c = axis == RollAxis::Length ? cfg.circumference_length : cfg.circumference_width;
    for (long k = 0; n > 0 && k <= n; ++k) {
        PlanSample s;
        s.t = k * dt;
        const double phase = 2 * kPi * f_roll * s.t;
        s.theta = steer.at(s.t);
        s.orientation = rz(s.theta) * (axis == RollAxis::Length ? rx(phase) : ry(phase));
        s.b_magnitude = b;
        s.kinematics = Kinematics::Rolling;
        s.circumference = c;
        p.keyframes.push_back(s);
    }
    p.waveform = render(p.keyframes, robot, cfg, gait_kind_name(p.kind));
    return p;
}

double crawl_stride_from_geometry(const Robot& robot, const GaitConfig& cfg, double tilt) {
    const TentacleParams tp = TentacleParams::from_robot(robot);
    const double lo = solve_tentacle(cfg.crawl_b_low * std::cos(tilt), tp).chord();
    const double hi = solve_tentacle(cfg.crawl_b_high * std::cos(tilt), tp).chord();
    return lo - hi;
}

GaitPlan plan_crawl(int cycles, double f_crawl, const Robot& robot, const GaitConfig& cfg,
                    const SteerProfile& steer) {
    cfg.validate();
    if (robot.mag.mode != Mode::Locomotion)
        throw std::invalid_argument("plan_crawl: two-anchor crawling requires the locomotion mode");
    if (cycles < 0) throw std::invalid_argument("plan_crawl: cycles must be >= 0");
    if (!(f_crawl > 0.0) || f_crawl > cfg.max_crawl_frequency)
        throw std::invalid_argument("plan_crawl: frequency outside (0, " + format_sig9(cfg.max_crawl_frequency) + "] Hz");
    check_b(std::max(cfg.crawl_b_high, cfg.crawl_b_low), cfg);

    GaitPlan p;
    p.kind = GaitKind::TwoAnchorCrawl;
    p.mode = Mode::Locomotion;
    p.b_magnitude = std::max(cfg.crawl_b_high, cfg.crawl_b_low);
    p.frequency = f_crawl;
    p.cycles = cycles;
    p.steer = steer;
    const double stride =
        cfg.stride_source == StrideSource::Geometry ? crawl_stride_from_geometry(robot, cfg) : cfg.crawl_stride;

    std::array<double, 6> edge{};
    for (int i = 0; i < 5; ++i) edge[i + 1] = edge[i] + cfg.crawl_phase_fractions[i];
    edge[5] = 1.0;
    const double tau = cfg.crawl_tilt, hi = cfg.crawl_b_high, lo = cfg.crawl_b_low;
    // tilt, |B| and earned stride within one cycle, u in [0, 1)
    auto state = [&](double u, double& tilt, double& b, double& earned) {
        int ph = 0;
        while (ph < 4 && u >= edge[ph + 1]) ++ph;
        const double s = (u - edge[ph]) / (edge[ph + 1] - edge[ph]);
        earned = 0.0;
        switch (ph) {
        case 0: tilt = s * tau; b = hi; break;
        case 1: tilt = tau; b = hi + s * (lo - hi); break;
        case 2: tilt = tau - 2 * tau * s; b = lo; earned = 0.5 * s; break;
        case 3: tilt = -tau; b = lo + s * (hi - lo); earned = 0.5 + 0.5 * s; break;
        default: tilt = -tau + s * tau; b = hi; earned = 1.0; break;
        }
    };

    const int spp = cfg.samples_per_period;
    const double dt = 1.0 / (spp * f_crawl);
    const long n = static_cast<long>(cycles) * spp;
    double prev = 0.0;
    for (long k = 0; n > 0 && k <= n; ++k) {
        const long cyc = k / spp;
        const double u = static_cast<double>(k % spp) / spp;
        double tilt = 0, b = hi, earned = 0;
        state(u, tilt, b, earned);
        PlanSample s;
        s.t = k * dt;
        s.theta = steer.at(s.t);
        s.orientation = rz(s.theta) * rx(tilt);
        s.b_magnitude = b;
        s.kinematics = Kinematics::Stride;
        const double total = (cyc + earned) * stride;
        s.stride_increment = k == 0 ? 0.0 : total - prev;
        prev = total;
        p.keyframes.push_back(s);
    }
    p.waveform = render(p.keyframes, robot, cfg, "crawl");
    return p;
}

GaitPlan plan_spin_walk(int steps, Mode mode, double b, double f, const Robot& robot, const GaitConfig& cfg,
                        const SteerProfile& steer) {
    cfg.validate();
    check_b(b, cfg);
    if (steps < 0) throw std::invalid_argument("plan_spin_walk: steps must be >= 0");
    if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("plan_spin_walk: frequency must be > 0");
    if (mode != robot.mag.mode) throw std::invalid_argument("plan_spin_walk: robot is not in the requested mode");
    double threshold = cfg.coil.b_max * (1 + 1e-12);
    if (is_function_mode(mode)) {
        threshold = default_opening_curve(mode).threshold_b;
        if (b >= threshold)
            throw std::invalid_argument("plan_spin_walk: |B| " + format_sig9(b) + " T reaches the " + mode_name(mode) +
                                        " activation threshold " + format_sig9(threshold) + " T");
    }

    GaitPlan p;
    p.kind = GaitKind::SpinWalk;
    p.mode = mode;
    p.b_magnitude = b;
    p.frequency = f;
    p.cycles = steps;
    p.steer = steer;
    const int per = cfg.spin_samples_per_step;
    const double dt = 1.0 / (4.0 * f * per);
    Mat3 base = Mat3::Identity();
    for (int st = 0; st < steps; ++st) {
        const bool about_x = st % 2 == 0;
        for (int j = 0; j < per; ++j) {
            const double a = 0.5 * kPi * j / per;
            PlanSample s;
            s.t = (static_cast<long>(st) * per + j) * dt;
            s.theta = steer.at(s.t);
            s.orientation = rz(s.theta) * base * (about_x ? rx(a) : ry(a));
            s.b_magnitude = b;
            s.kinematics = Kinematics::Rolling;
            s.circumference = about_x ? cfg.circumference_length : cfg.circumference_width;
            p.keyframes.push_back(s);
        }
        base = gram_schmidt(base * (about_x ? rx(0.5 * kPi) : ry(0.5 * kPi)));
    }
    if (steps > 0) {
        PlanSample s;
        s.t = static_cast<long>(steps) * per * dt;
        s.theta = steer.at(s.t);
        s.orientation = rz(s.theta) * base;
        s.b_magnitude = b;
        s.kinematics = Kinematics::Rolling;
        s.circumference = (steps - 1) % 2 == 0 ? cfg.circumference_length : cfg.circumference_width;
        p.keyframes.push_back(s);
    }
    p.waveform = render(p.keyframes, robot, cfg, "spin_walk");
    for (size_t i = 0; i < p.waveform.samples.size(); ++i)
        if (p.waveform.samples[i].fs.b.norm() >= threshold)
            throw std::invalid_argument("plan_spin_walk: sample " + std::to_string(i) +
                                        " reaches the activation threshold");
    return p;
}

SimEnv SimEnv::preset(const std::string& name) {
    SimEnv e;
    // crawl speed at 2.5 Hz over the ideal line: 1.06 mm/s (oil), 0.78 mm/s (air)
    if (name == "oil") e.slip_factor = 1.0 - 1.06 / (0.742 * 2.5);
    else if (name == "air") e.slip_factor = 1.0 - 0.78 / (0.742 * 2.5);
    else if (name == "ideal") e.slip_factor = 0.0;
    else throw std::invalid_argument("unknown environment '" + name + "'");
    return e;
}

void SimEnv::validate() const {
    if (!(slip_factor >= 0.0 && slip_factor <= 1.0)) throw std::invalid_argument("slip_factor must be in [0, 1]");
}

Vec3 Trajectory::displacement() const {
    if (samples.empty()) return Vec3::Zero();
    return samples.back().position - samples.front().position;
}

bool Trajectory::any_step_out() const {
    return std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.flags & kFlagStepOut; });
}

void Trajectory::append(const Trajectory& other, double t0) {
    for (const auto& s : other.samples) {
        TrajectorySample c = s;
        c.t += t0;
        if (!samples.empty() && !(c.t > samples.back().t)) continue;
        samples.push_back(c);
    }
}

Trajectory simulate(const GaitPlan& plan, const Robot& robot, const SimEnv& env, const GaitConfig& cfg,
                    const Vec3& start) {
    env.validate();
    cfg.validate();
    Trajectory tr;
    if (plan.keyframes.empty()) return tr;

    std::map<double, double> tips;
    auto tip = [&](double b) {
        if (plan.mode != Mode::Locomotion || b == 0.0) return 0.0;
        auto it = tips.find(b);
        if (it != tips.end()) return it->second;
        const double a = solve_tentacle(b, TentacleParams::from_robot(robot)).tip_angle();
        tips.emplace(b, a);
        return a;
    };

    const double keep = 1.0 - env.slip_factor;
    Vec3 pos = start;
    if (env.gravity) pos.z() = env.substrate_z;
    Mat3 actual = plan.keyframes.front().orientation;
    tr.samples.push_back({plan.keyframes.front().t, pos, actual, tip(plan.keyframes.front().b_magnitude), kFlagNone});

    for (size_t i = 1; i < plan.keyframes.size(); ++i) {
        const PlanSample& k = plan.keyframes[i];
        const double dt = k.t - plan.keyframes[i - 1].t;
        unsigned flags = kFlagNone;
        const Vec3 w_body = rotation_log(actual.transpose() * k.orientation) / dt;
        bool out = false;
        for (int a = 0; a < 3; ++a) out = out || std::abs(w_body[a]) > cfg.step_out[a] * (1 + 1e-12);
        if (out) {
            flags |= kFlagStepOut;
        } else {
            if (k.kinematics == Kinematics::Rolling) {
                Vec3 w = rotation_log(k.orientation * actual.transpose());
                w.z() = 0.0;
                pos += keep * k.circumference / (2 * kPi) * w.cross(Vec3::UnitZ());
            }
            actual = k.orientation;
        }
        if (k.kinematics == Kinematics::Stride && !out) {
            const double psi = k.theta;
            pos += keep * k.stride_increment * Vec3(-std::sin(psi), std::cos(psi), 0.0);
        }
        if (env.gravity) pos.z() = env.substrate_z;
        tr.samples.push_back({k.t, pos, actual, tip(k.b_magnitude), flags});
    }
    return tr;
}

void write_trajectory_csv(const Trajectory& tr, std::ostream& os) {
    os << kTrajectoryCsvHeader << '\n';
    for (const auto& s : tr.samples) {
        const RollPitchYaw e = euler_zyx(s.orientation);
        os << format_sig9(s.t) << ',' << format_sig9(s.position.x()) << ',' << format_sig9(s.position.y()) << ','
           << format_sig9(s.position.z()) << ',' << format_sig9(e.roll) << ',' << format_sig9(e.pitch) << ','
           << format_sig9(e.yaw) << ',' << (s.flags & kFlagStepOut ? "step_out" : "ok") << '\n';
    }
}

void emit_trajectory_csv(const Trajectory& tr, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    write_trajectory_csv(tr, os);
    os.flush();
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace magbot
