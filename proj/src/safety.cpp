#include "magbot/safety.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace magbot {

WaveformSpec WaveformSpec::harmonic(double b0, double f) {
    WaveformSpec s;
    s.kind = Kind::Harmonic;
    s.b0 = b0;
    s.f = f;
    return s;
}

WaveformSpec WaveformSpec::step_rl(double b0, double l, double r) {
    WaveformSpec s;
    s.kind = Kind::StepRL;
    s.b0 = b0;
    s.l = l;
    s.r = r;
    return s;
}

WaveformSpec WaveformSpec::ramp(double k, double t_end) {
    WaveformSpec s;
    s.kind = Kind::Ramp;
    s.k = k;
    s.t_end = t_end;
    s.b0 = k * t_end;
    return s;
}

WaveformSpec WaveformSpec::decaying_harmonic(double b0, double k_d, double f) {
    WaveformSpec s;
    s.kind = Kind::DecayingHarmonic;
    s.b0 = b0;
    s.k_d = k_d;
    s.f = f;
    return s;
}

void WaveformSpec::validate() const {
    auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    bool ok = b0 >= 0.0;
    switch (kind) {
    case Kind::Harmonic: ok = ok && pos(f); break;
    case Kind::StepRL: ok = ok && pos(l) && pos(r); break;
    case Kind::Ramp: ok = ok && pos(k) && pos(t_end); break;
    case Kind::DecayingHarmonic: ok = ok && pos(f) && k_d >= 0.0; break;
    }
    if (!ok) throw std::invalid_argument("waveform spec: parameters must be positive");
}

double dbdt_limit(double eta_ms) {
    if (!(eta_ms > 0.0)) throw std::invalid_argument("dbdt_limit: eta must be > 0");
    return 54.0 * (1.0 + 0.138 / eta_ms);
}

double eta_of(const WaveformSpec& s) {
    s.validate();
    switch (s.kind) {
    case WaveformSpec::Kind::Harmonic:
    case WaveformSpec::Kind::DecayingHarmonic: return 1e3 / (4.0 * s.f);
    case WaveformSpec::Kind::StepRL: return 1e3 * 4.0 * s.l / s.r;
    case WaveformSpec::Kind::Ramp: return 1e3 * s.t_end;
    }
    return 0.0;
}

double reported_dbdt(const WaveformSpec& s) {
    s.validate();
    switch (s.kind) {
    case WaveformSpec::Kind::Harmonic:
    case WaveformSpec::Kind::DecayingHarmonic: return 2 * kPi * s.f * s.b0;
    case WaveformSpec::Kind::StepRL: return s.b0 / (eta_of(s) * 1e-3);
    case WaveformSpec::Kind::Ramp: return s.k;
    }
    return 0.0;
}

double instantaneous_dbdt(const WaveformSpec& s) {
    if (s.kind == WaveformSpec::Kind::StepRL) {
        s.validate();
        return s.b0 * s.r / s.l;
    }
    return reported_dbdt(s);
}

double hf_product(const WaveformSpec& s, double step_factor) {
    s.validate();
    const double h = s.b0 / kMu0;
    switch (s.kind) {
    case WaveformSpec::Kind::Harmonic:
    case WaveformSpec::Kind::DecayingHarmonic: return h * s.f;
    case WaveformSpec::Kind::Ramp: return h / s.t_end;
    case WaveformSpec::Kind::StepRL: return h * step_factor / (eta_of(s) * 1e-3);
    }
    return 0.0;
}

std::string verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Flagged: return "FLAGGED";
    }
    return "PASS";
}

namespace {

void finish(SafetyReport& r, const AuditOptions& opt) {
    if (opt.flag_dbdt) {
        r.dbdt_verdict = Verdict::Flagged;
        r.notes.push_back(opt.flag_note.empty() ? "dB/dt flagged" : opt.flag_note);
    } else {
        r.dbdt_verdict = r.reported_dbdt > r.max_allowed_dbdt ? Verdict::Fail : Verdict::Pass;
    }
    r.hf_verdict = r.hf_product > r.hf_limit ? Verdict::Fail : Verdict::Pass;
}

}  // namespace

SafetyReport audit(const WaveformSpec& s, const AuditOptions& opt) {
    SafetyReport r;
    r.label = opt.label;
    r.eta_ms = eta_of(s);
    r.max_allowed_dbdt = dbdt_limit(r.eta_ms);
    r.reported_dbdt = reported_dbdt(s);
    r.instantaneous_dbdt = instantaneous_dbdt(s);
    r.hf_product = hf_product(s, opt.step_hf_factor);
    if (s.kind == WaveformSpec::Kind::StepRL) {
        r.hf_convention_fitted = true;
        r.notes.push_back("step |H|f uses a fitted effective frequency");
        r.notes.push_back("instantaneous dB/dt at t=0: " + format_sig9(r.instantaneous_dbdt) + " T/s");
    }
    finish(r, opt);
    return r;
}

SafetyReport audit(const Waveform& w, const AuditOptions& opt) {
    if (w.samples.size() < 2) throw std::invalid_argument("audit: need at least 2 samples");
    SafetyReport r;
    r.label = opt.label;
    const auto& s = w.samples;
    double max_rate = 0.0, bmax = 0.0;
    for (size_t k = 0; k < s.size(); ++k) {
        bmax = std::max(bmax, s[k].fs.b.norm());
        if (k == 0) continue;
        const double dt = s[k].t - s[k - 1].t;
        if (!(dt > 0.0)) throw std::invalid_argument("audit: sample times must increase");
        max_rate = std::max(max_rate, (s[k].fs.b - s[k - 1].fs.b).norm() / dt);
    }
    // Turning points of |B| (flat stretches extend the current run), refined to
    // sub-sample times: parabolic vertex for maxima, V intersection for minima.
    std::vector<double> mag(s.size());
    for (size_t k = 0; k < s.size(); ++k) mag[k] = s[k].fs.b.norm();
    const double tol = 1e-15 * std::max(bmax, 1e-30);
    auto refine = [&](size_t k, bool is_max) {
        const double t0 = s[k].t;
        if (k == 0 || k + 1 >= s.size()) return t0;
        const double ya = mag[k - 1], yb = mag[k], yc = mag[k + 1];
        const double ha = t0 - s[k - 1].t, hc = s[k + 1].t - t0;
        if (is_max || k < 2 || k + 2 >= s.size()) {
            const double den = ya - 2 * yb + yc;
            if (den == 0.0 || std::abs(ha - hc) > 1e-9 * ha) return t0;
            const double d = std::clamp(0.5 * (ya - yc) / den, -0.5, 0.5);
            if (is_max) bmax = std::max(bmax, yb - 0.25 * (ya - yc) * d);
            return t0 + d * ha;
        }
        // lines through (k-2, k-1) and (k+1, k+2)
        const double sl = (mag[k - 1] - mag[k - 2]) / (s[k - 1].t - s[k - 2].t);
        const double sr = (mag[k + 2] - mag[k + 1]) / (s[k + 2].t - s[k + 1].t);
        if (!(sl < 0 && sr > 0)) return t0;
        const double t = (mag[k + 1] - mag[k - 1] + sl * s[k - 1].t - sr * s[k + 1].t) / (sl - sr);
        return std::clamp(t, s[k - 1].t, s[k + 1].t);
    };
    double eta = 0.0, t_start = s[0].t;
    int dir = 0;
    for (size_t k = 1; k < s.size(); ++k) {
        const double d = mag[k] - mag[k - 1];
        const int sg = d > tol ? 1 : (d < -tol ? -1 : 0);
        if (sg == 0 || dir == 0 || sg == dir) {
            if (dir == 0) dir = sg;
            continue;
        }
        const double tp = refine(k - 1, dir > 0);
        eta = std::max(eta, tp - t_start);
        t_start = tp;
        dir = sg;
    }
    eta = std::max(eta, s.back().t - t_start);
    r.eta_ms = eta * 1e3;
    r.max_allowed_dbdt = dbdt_limit(r.eta_ms);
    r.reported_dbdt = max_rate;
    r.instantaneous_dbdt = max_rate;
    r.hf_product = bmax / kMu0 / (4.0 * eta);
    finish(r, opt);
    return r;
}

std::vector<SafetyCategory> standard_categories() {
    std::vector<SafetyCategory> c;
    auto add = [&](std::string label, std::string action, WaveformSpec spec) {
        SafetyCategory sc{label, std::move(action), spec, AuditOptions{}};
        sc.options.label = label;
        c.push_back(std::move(sc));
    };
    add("I", "locomotion (rotating field)", WaveformSpec::harmonic(15e-3, 3.0));
    add("II", "actuating a function (step)", WaveformSpec::step_rl(34e-3, 6.3e-4, 0.79));
    add("IIIa-step", "magnetization (step)", WaveformSpec::step_rl(60e-3, 1.9e-4, 2.5));
    add("IIIa-ramp", "magnetization (ramp)", WaveformSpec::ramp(12.0, 5e-3));
    add("IIIb", "demagnetization", WaveformSpec::decaying_harmonic(65e-3, 2e-3, 45.0));
    add("IV", "remote heating", WaveformSpec::harmonic(9.34e-3, 75.4e3));
    c.back().options.flag_dbdt = true;
    c.back().options.flag_note =
        "closed-form dB/dt of the heating field exceeds the limit; published value disagrees";
    return c;
}

std::string format_report_text(const std::vector<SafetyReport>& reports) {
    std::ostringstream os;
    for (const auto& r : reports) {
        os << r.label << " dbdt " << format_sig9(r.reported_dbdt) << " limit "
           << format_sig9(r.max_allowed_dbdt) << " T/s eta " << format_sig9(r.eta_ms) << " ms "
           << verdict_name(r.dbdt_verdict) << '\n';
        os << r.label << " hf " << format_sig9(r.hf_product) << " limit " << format_sig9(r.hf_limit)
           << " A/(m s) " << verdict_name(r.hf_verdict) << (r.hf_convention_fitted ? " (fitted)" : "")
           << '\n';
    }
    return os.str();
}

std::string format_report_kv(const std::vector<SafetyReport>& reports) {
    std::ostringstream os;
    for (const auto& r : reports) {
        const std::string p = r.label + ".";
        os << p << "eta_ms=" << format_sig9(r.eta_ms) << '\n';
        os << p << "max_allowed_dbdt=" << format_sig9(r.max_allowed_dbdt) << '\n';
        os << p << "reported_dbdt=" << format_sig9(r.reported_dbdt) << '\n';
        os << p << "instantaneous_dbdt=" << format_sig9(r.instantaneous_dbdt) << '\n';
        os << p << "hf_product=" << format_sig9(r.hf_product) << '\n';
        os << p << "hf_convention_fitted=" << (r.hf_convention_fitted ? "true" : "false") << '\n';
        os << p << "dbdt_verdict=" << verdict_name(r.dbdt_verdict) << '\n';
        os << p << "hf_verdict=" << verdict_name(r.hf_verdict) << '\n';
        for (size_t i = 0; i < r.notes.size(); ++i) os << p << "note" << i << '=' << r.notes[i] << '\n';
    }
    return os.str();
}

}  // namespace magbot
