#include "magbot/reprogram_thermal.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "magbot/errors.hpp"

namespace magbot {

std::string reprogram_kind_name(ReprogramKind k) {
    switch (k) {
    case ReprogramKind::StepMagnetize: return "step_magnetize";
    case ReprogramKind::RampMagnetize: return "ramp_magnetize";
    case ReprogramKind::Demagnetize: return "demagnetize";
    }
    return "demagnetize";
}

double demag_end_time(const ReprogramParams& p) { return p.b_demag / (p.k_demag * p.f_demag); }

double demag_waveform(double t, const ReprogramParams& p) {
    const double te = demag_end_time(p);
    if (!(t >= 0.0 && t <= te)) throw std::invalid_argument("demag_waveform: t outside [0, t_end]");
    const double env = std::max(0.0, p.b_demag - p.k_demag * p.f_demag * t);
    return env * std::cos(2 * kPi * p.f_demag * t);
}

double magnetize_waveform(ReprogramKind kind, double t, const ReprogramParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("magnetize_waveform: t must be >= 0");
    switch (kind) {
    case ReprogramKind::StepMagnetize: return p.b_mag * (1.0 - std::exp(-t * p.r_coil / p.l_coil));
    case ReprogramKind::RampMagnetize: return std::min(p.k_ramp * t, p.b_mag);
    case ReprogramKind::Demagnetize: break;
    }
    throw std::invalid_argument("magnetize_waveform: not a magnetizing kind");
}

double ReprogramWaveform::t_end() const {
    switch (kind) {
    case ReprogramKind::StepMagnetize: return params.pulse;
    case ReprogramKind::RampMagnetize: return params.b_mag / params.k_ramp;
    case ReprogramKind::Demagnetize: return demag_end_time(params);
    }
    return 0.0;
}

double ReprogramWaveform::peak() const {
    return kind == ReprogramKind::Demagnetize ? params.b_demag : params.b_mag;
}

double ReprogramWaveform::value(double t) const {
    if (kind == ReprogramKind::Demagnetize) return demag_waveform(t, params);
    return magnetize_waveform(kind, t, params);
}

std::string ReprogramWaveform::category() const {
    switch (kind) {
    case ReprogramKind::StepMagnetize: return "IIIa-step";
    case ReprogramKind::RampMagnetize: return "IIIa-ramp";
    case ReprogramKind::Demagnetize: return "IIIb";
    }
    return "IIIb";
}

Waveform ReprogramWaveform::sample(double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("ReprogramWaveform::sample: dt must be > 0");
    Waveform w;
    w.category = category();
    const double te = t_end();
    const long n = static_cast<long>(std::floor(te / dt + 1e-9));
    std::vector<double> times;
    for (long i = 0; i <= n; ++i) times.push_back(std::min(i * dt, te));
    if (te - times.back() > 1e-12 * te) times.push_back(te);
    for (const double t : times) {
        WaveformSample s;
        s.t = t;
        s.fs.b = value(t) * direction;
        s.fs.frame = Frame::Global;
        s.tag = w.category;
        w.samples.push_back(s);
    }
    return w;
}

ReprogramWaveform make_magnetize(ReprogramKind kind, double phi, const ReprogramParams& p) {
    if (kind == ReprogramKind::Demagnetize) throw std::invalid_argument("make_magnetize: use make_demagnetize");
    ReprogramWaveform w;
    w.kind = kind;
    w.direction = Vec3(std::cos(phi), std::sin(phi), 0.0);
    w.params = p;
    return w;
}

ReprogramWaveform make_demagnetize(const ReprogramParams& p) {
    ReprogramWaveform w;
    w.kind = ReprogramKind::Demagnetize;
    w.direction = Vec3::UnitX();
    w.params = p;
    return w;
}

MagnetizationState apply_reprogram(const MagnetizationState& s, const ReprogramWaveform& w,
                                   const Materials& mat) {
    const double peak = w.peak();
    const double hci = mat.min_hard_coercivity();
    if (peak >= hci)
        throw SafetyRefusal("reprogram refused: peak field " + format_sig9(peak) +
                            " T would remagnetize a hard component (coercivity " + format_sig9(hci) + " T)");
    MagnetizationState out = s;
    if (w.kind == ReprogramKind::Demagnetize) {
        out.m_rprog = mat.rprog.m_demagnetized.value_or(0.0);
        out.m_heat = mat.heat.m_demagnetized.value_or(0.0);
        out.phi = 0.0;
        out.programmable_magnetized = false;
        out.mode = Mode::Locomotion;
        return out;
    }
    if (std::abs(w.direction.z()) > 1e-9 || std::abs(w.direction.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("apply_reprogram: magnetizing direction must be a unit vector in the XY plane");
    double phi = std::atan2(w.direction.y(), w.direction.x());
    if (phi < 0) phi += 2 * kPi;
    out.mode = mode_from_phi(phi);
    out.phi = mode_phi(out.mode);
    out.m_rprog = mat.rprog.m_magnetized;
    out.m_heat = mat.heat.m_magnetized;
    out.programmable_magnetized = true;
    return out;
}

ThermalState heat_step(const ThermalState& ts, double dt, bool field_on) {
    if (!(dt >= 0.0)) throw std::invalid_argument("heat_step: dt must be >= 0");
    ThermalState out = ts;
    if (dt == 0.0) return out;
    if (field_on) {
        out.temperature += ts.heat_power * dt / (ts.mass * ts.specific_heat);
    } else {
        out.temperature = ts.ambient + (ts.temperature - ts.ambient) * std::exp(-dt / ts.tau_cool);
    }
    return out;
}

double heating_power_ratio(HeatingMaterial a, HeatingMaterial b) {
    auto rise = [](HeatingMaterial m) { return m == HeatingMaterial::Heat ? 15.0 : 60.0; };
    return rise(b) / rise(a);
}

}  // namespace magbot
