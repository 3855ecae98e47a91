#include "magbot/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "magbot/errors.hpp"

namespace magbot {

std::string step_type_name(StepType t) {
    switch (t) {
    case StepType::SetMode: return "set_mode";
    case StepType::Gait: return "gait";
    case StepType::Function: return "function";
    case StepType::Heat: return "heat";
    case StepType::Wait: return "wait";
    }
    return "wait";
}

const OpeningCurve& Scenario::curve(Mode m) const {
    static const std::map<Mode, OpeningCurve> defaults = {
        {Mode::DrugDispensing, default_opening_curve(Mode::DrugDispensing)},
        {Mode::Cutting, default_opening_curve(Mode::Cutting)},
        {Mode::GrippingStorage, default_opening_curve(Mode::GrippingStorage)},
    };
    auto it = curves.find(m);
    if (it != curves.end()) return it->second;
    auto d = defaults.find(m);
    if (d == defaults.end()) throw std::invalid_argument("no opening curve for " + mode_name(m));
    return d->second;
}

namespace {

[[noreturn]] void fail(int i, const std::string& msg) {
    throw ConfigError("step " + std::to_string(i) + ": " + msg, i);
}

std::string num(double v) { return format_sig9(v); }

}  // namespace

void Scenario::validate() const {
    try {
        gait.validate();
        env.validate();
        robot.mat.validate();
        robot.geom.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(reprogram_dt > 0 && function_fine_dt > 0 && function_coarse_dt > 0 && heat_dt > 0))
        throw ConfigError("sampling intervals must be > 0");
    Mode mode = robot.mag.mode;
    const double bmax = gait.coil.b_max;
    for (size_t k = 0; k < steps.size(); ++k) {
        const int i = static_cast<int>(k);
        const Step& s = steps[k];
        if (!(s.duration >= 0.0) || !std::isfinite(s.duration)) fail(i, "duration must be >= 0");
        switch (s.type) {
        case StepType::SetMode:
            if (s.demagnetize) {
                mode = Mode::Locomotion;
            } else {
                if (s.method == ReprogramKind::Demagnetize) fail(i, "magnetizing method must be step or ramp");
                try {
                    mode = mode_from_phi(s.phi);
                } catch (const std::invalid_argument& e) {
                    fail(i, e.what());
                }
            }
            break;
        case StepType::Gait:
            if (!(s.b >= 0.0) || s.b > bmax) fail(i, "gait |B| must be within [0, " + num(bmax) + "] T");
            switch (s.gait) {
            case GaitKind::RollLength:
            case GaitKind::RollWidth:
                if (!(s.frequency >= 0.0) || s.frequency > gait.max_roll_frequency)
                    fail(i, "roll frequency outside [0, " + num(gait.max_roll_frequency) + "] Hz");
                break;
            case GaitKind::TwoAnchorCrawl:
                if (mode != Mode::Locomotion) fail(i, "two-anchor crawling requires the locomotion mode");
                if (s.cycles < 0) fail(i, "cycles must be >= 0");
                if (!(s.frequency > 0.0) || s.frequency > gait.max_crawl_frequency)
                    fail(i, "crawl frequency outside (0, " + num(gait.max_crawl_frequency) + "] Hz");
                break;
            case GaitKind::SpinWalk:
                if (s.mode != mode) fail(i, "spin walk mode " + mode_name(s.mode) + " does not match the robot mode " + mode_name(mode));
                if (s.cycles < 0) fail(i, "steps must be >= 0");
                if (!(s.frequency > 0.0)) fail(i, "spin walk frequency must be > 0");
                break;
            }
            break;
        case StepType::Function:
            if (!is_function_mode(s.mode)) fail(i, "function step needs a function mode");
            if (s.mode != mode)
                fail(i, "function " + mode_name(s.mode) + " requires the robot in that mode (current: " + mode_name(mode) + ")");
            if (!(s.b > 0.0) || s.b > bmax) fail(i, "function |B| must be within (0, " + num(bmax) + "] T");
            break;
        case StepType::Heat:
        case StepType::Wait: break;
        }
    }
}

bool RunResult::safety_passed() const {
    for (const auto& a : audits)
        if (!a.report.passed()) return false;
    return true;
}

std::vector<std::string> RunResult::activity() const {
    std::vector<std::string> out;
    for (const auto& e : events) {
        if (e.kind != "gait" && e.kind != "function" && e.kind != "demagnetize") continue;
        out.push_back(e.kind + ":" + e.detail.substr(0, e.detail.find(' ')));
    }
    return out;
}

namespace {

void append_segment(Waveform& all, const Waveform& seg, double t0, bool drop_last) {
    const size_t n = drop_last && !seg.samples.empty() ? seg.samples.size() - 1 : seg.samples.size();
    for (size_t i = 0; i < n; ++i) {
        WaveformSample s = seg.samples[i];
        s.t += t0;
        all.samples.push_back(std::move(s));
    }
}

WaveformSpec reprogram_spec(const ReprogramWaveform& w) {
    const ReprogramParams& p = w.params;
    switch (w.kind) {
    case ReprogramKind::StepMagnetize: return WaveformSpec::step_rl(p.b_mag, p.l_coil, p.r_coil);
    case ReprogramKind::RampMagnetize: return WaveformSpec::ramp(p.k_ramp, p.b_mag / p.k_ramp);
    case ReprogramKind::Demagnetize: break;
    }
    return WaveformSpec::decaying_harmonic(p.b_demag, p.k_demag, p.f_demag);
}

AuditOptions options_for(const std::string& label) {
    for (const auto& c : standard_categories())
        if (c.label == label) return c.options;
    AuditOptions o;
    o.label = label;
    return o;
}

void check_coil(const Waveform& w, const CoilLimits& lim, int step) {
    const long bad = first_coil_violation(w, lim);
    if (bad >= 0)
        throw SafetyRefusal("step " + std::to_string(step) + ": sample " + std::to_string(bad) +
                            " exceeds the coil capacity");
}

}  // namespace

RunResult run(const Scenario& sc) {
    sc.validate();
    RunResult out;
    Robot robot = sc.robot;
    ThermalState thermal = sc.thermal;
    Vec3 pos = Vec3::Zero();
    double t = 0.0;
    auto event = [&](int i, const std::string& kind, const std::string& detail) {
        out.events.push_back({t, i, kind, detail});
    };

    for (size_t k = 0; k < sc.steps.size(); ++k) {
        const int i = static_cast<int>(k);
        const Step& s = sc.steps[k];
        try {
            switch (s.type) {
            case StepType::SetMode: {
                const ReprogramWaveform w =
                    s.demagnetize ? make_demagnetize(sc.reprogram) : make_magnetize(s.method, s.phi, sc.reprogram);
                robot.mag = apply_reprogram(robot.mag, w, robot.mat);
                const Waveform seg = w.sample(sc.reprogram_dt);
                append_segment(out.waveform, seg, t, true);
                out.audits.push_back({i, audit(reprogram_spec(w), options_for(w.category()))});
                if (s.demagnetize)
                    event(i, "demagnetize", "locomotion peak_T=" + num(w.peak()));
                else
                    event(i, "magnetize", mode_name(robot.mag.mode) + " phi_deg=" + num(rad2deg(robot.mag.phi)) +
                                              " method=" + reprogram_kind_name(s.method));
                t += w.t_end();
                break;
            }
            case StepType::Gait: {
                GaitPlan plan;
                switch (s.gait) {
                case GaitKind::RollLength:
                case GaitKind::RollWidth:
                    plan = plan_roll(s.gait == GaitKind::RollLength ? RollAxis::Length : RollAxis::Width, s.b,
                                     s.frequency, s.duration, s.steer, robot, sc.gait);
                    break;
                case GaitKind::TwoAnchorCrawl:
                    plan = plan_crawl(s.cycles, s.frequency, robot, sc.gait, s.steer);
                    break;
                case GaitKind::SpinWalk:
                    if (is_function_mode(s.mode) && s.b >= sc.curve(s.mode).threshold_b)
                        throw SafetyRefusal("step " + std::to_string(i) + ": spin walk |B| " + num(s.b) +
                                            " T reaches the " + mode_name(s.mode) + " activation threshold " +
                                            num(sc.curve(s.mode).threshold_b) + " T");
                    plan = plan_spin_walk(s.cycles, s.mode, s.b, s.frequency, robot, sc.gait, s.steer);
                    break;
                }
                check_coil(plan.waveform, sc.gait.coil, i);
                const Trajectory tr = simulate(plan, robot, sc.env, sc.gait, pos);
                const Vec3 d = tr.displacement();
                event(i, "gait", gait_kind_name(plan.kind) + " b_T=" + num(plan.b_magnitude) + " f_Hz=" +
                                     num(plan.frequency) + " duration_s=" + num(plan.duration()) +
                                     " displacement_m=" + num(d.norm()));
                bool was_out = false;
                for (const auto& ts : tr.samples) {
                    const bool o = ts.flags & kFlagStepOut;
                    if (o && !was_out) out.events.push_back({t + ts.t, i, "step_out", "tracking lost"});
                    was_out = o;
                }
                append_segment(out.waveform, plan.waveform, t, false);
                out.trajectory.append(tr, t);
                if (!tr.empty()) pos = tr.samples.back().position;
                if (plan.waveform.size() >= 2) out.audits.push_back({i, audit(plan.waveform, options_for("I"))});
                t += plan.duration();
                break;
            }
            case StepType::Function: {
                const double tau = sc.function_l / sc.function_r;
                Waveform seg;
                seg.category = "II";
                const std::string tag = "function_" + mode_name(s.mode);
                const double fine_end = std::min(s.duration, 20 * tau);
                auto push = [&](double ts) {
                    WaveformSample w;
                    w.t = ts;
                    w.fs.b = Vec3(0, 0, s.b * (1.0 - std::exp(-ts / tau)));
                    w.tag = tag;
                    seg.samples.push_back(w);
                };
                const long nf = std::lround(std::floor(fine_end / sc.function_fine_dt + 1e-9));
                for (long j = 0; j < nf; ++j) push(j * sc.function_fine_dt);
                const long nc = std::lround(std::floor((s.duration - fine_end) / sc.function_coarse_dt + 1e-9));
                for (long j = 0; j < nc; ++j) push(fine_end + j * sc.function_coarse_dt);
                check_coil(seg, sc.gait.coil, i);
                append_segment(out.waveform, seg, t, false);
                out.audits.push_back(
                    {i, audit(WaveformSpec::step_rl(s.b, sc.function_l, sc.function_r), options_for("II"))});
                const double a = opening(s.mode, s.b, sc.curve(s.mode));
                event(i, "function", mode_name(s.mode) + " b_T=" + num(s.b) + " duration_s=" + num(s.duration));
                if (a > 0.0)
                    event(i, "threshold", "opening > 0 (" + num(a * 1e6) + " um)");
                else
                    event(i, "threshold", "opening = 0 (below " + num(sc.curve(s.mode).threshold_b) + " T)");
                t += s.duration;
                break;
            }
            case StepType::Heat: {
                Waveform seg;
                seg.category = "IV";
                const long n = std::lround(std::floor(s.duration / sc.heat_dt + 1e-9));
                for (long j = 0; j < n; ++j) {
                    WaveformSample w;
                    w.t = j * sc.heat_dt;
                    w.fs.b = Vec3(sc.heat_b, 0, 0);
                    w.tag = "heat_envelope_" + num(sc.heat_f) + "Hz";
                    seg.samples.push_back(w);
                }
                append_segment(out.waveform, seg, t, false);
                out.audits.push_back({i, audit(WaveformSpec::harmonic(sc.heat_b, sc.heat_f), options_for("IV"))});
                thermal = heat_step(thermal, s.duration, true);
                event(i, "heat", "duration_s=" + num(s.duration) + " temperature_C=" + num(thermal.temperature));
                t += s.duration;
                break;
            }
            case StepType::Wait: {
                thermal = heat_step(thermal, s.duration, false);
                if (s.duration > 0.0) {
                    WaveformSample w;
                    w.t = t;
                    w.tag = "wait";
                    out.waveform.samples.push_back(w);
                }
                event(i, "wait", "duration_s=" + num(s.duration) + " temperature_C=" + num(thermal.temperature));
                t += s.duration;
                break;
            }
            }
        } catch (const std::invalid_argument& e) {
            fail(i, e.what());
        }
    }
    out.final_state = robot.mag;
    out.final_thermal = thermal;
    return out;
}

std::string format_event_log(const std::vector<Event>& events) {
    std::ostringstream os;
    for (const auto& e : events)
        os << "t=" << format_sig9(e.t) << " step=" << e.step << ' ' << e.kind << ' ' << e.detail << '\n';
    return os.str();
}

std::string format_safety_report(const std::vector<SegmentAudit>& audits) {
    std::ostringstream os;
    for (const auto& a : audits) {
        os << "# step " << a.step << " category " << a.report.label << '\n';
        os << format_report_text({a.report});
        for (const auto& n : a.report.notes) os << "#   " << n << '\n';
    }
    bool ok = true;
    for (const auto& a : audits) ok = ok && a.report.passed();
    os << "overall " << (ok ? "PASS" : "FAIL") << '\n';
    return os.str();
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    os << text;
    os.flush();
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace

RunOutput write_outputs(const RunResult& r, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    RunOutput o;
    o.waveform_path = (fs::path(out_dir) / "waveform.csv").string();
    o.trajectory_path = (fs::path(out_dir) / "trajectory.csv").string();
    o.event_log_path = (fs::path(out_dir) / "events.log").string();
    o.safety_report_path = (fs::path(out_dir) / "safety_report.txt").string();
    emit_waveform_csv(r.waveform, o.waveform_path);
    emit_trajectory_csv(r.trajectory, o.trajectory_path);
    write_text(o.event_log_path, format_event_log(r.events));
    write_text(o.safety_report_path, format_safety_report(r.audits));
    return o;
}

}  // namespace magbot
