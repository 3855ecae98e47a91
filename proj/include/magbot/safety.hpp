#pragma once

#include <string>
#include <vector>

#include "magbot/waveform.hpp"

namespace magbot {

constexpr double kMu0 = 4e-7 * kPi;
constexpr double kHfLimit = 9.46e9;  // A/(m s)

struct WaveformSpec {
    enum class Kind { Harmonic, StepRL, Ramp, DecayingHarmonic };
    Kind kind = Kind::Harmonic;
    double b0 = 0.0;     // T (amplitude, step height, or ramp end value)
    double f = 0.0;      // Hz
    double l = 0.0;      // H
    double r = 0.0;      // ohm
    double k = 0.0;      // T/s (ramp)
    double t_end = 0.0;  // s (ramp)
    double k_d = 0.0;    // T per period (decaying harmonic)

    static WaveformSpec harmonic(double b0, double f);
    static WaveformSpec step_rl(double b0, double l, double r);
    static WaveformSpec ramp(double k, double t_end);
    static WaveformSpec decaying_harmonic(double b0, double k_d, double f);
    void validate() const;
};

// 54 (1 + 0.138 / eta), eta in ms.
double dbdt_limit(double eta_ms);
double eta_of(const WaveformSpec& s);  // ms
double reported_dbdt(const WaveformSpec& s);
// Initial-slope value for steps (B0 R / L); equals reported_dbdt otherwise.
double instantaneous_dbdt(const WaveformSpec& s);
// |H| f_effective. Steps use f_effective = step_factor / eta.
double hf_product(const WaveformSpec& s, double step_factor = 0.2);

enum class Verdict { Pass, Fail, Flagged };
std::string verdict_name(Verdict v);

struct AuditOptions {
    std::string label = "custom";
    double step_hf_factor = 0.2;
    // Marks the dB/dt criterion as known-inconsistent with published data.
    bool flag_dbdt = false;
    std::string flag_note;
};

struct SafetyReport {
    std::string label;
    double eta_ms = 0.0;
    double max_allowed_dbdt = 0.0;
    double reported_dbdt = 0.0;
    double instantaneous_dbdt = 0.0;
    double hf_product = 0.0;
    double hf_limit = kHfLimit;
    bool hf_convention_fitted = false;
    Verdict dbdt_verdict = Verdict::Pass;
    Verdict hf_verdict = Verdict::Pass;
    std::vector<std::string> notes;

    bool passed() const { return dbdt_verdict != Verdict::Fail && hf_verdict != Verdict::Fail; }
};

SafetyReport audit(const WaveformSpec& s, const AuditOptions& opt = {});
// Sampled audit: eta = longest monotonic run of |B|, dB/dt = largest |dB/dt| finite difference.
SafetyReport audit(const Waveform& w, const AuditOptions& opt = {});

struct SafetyCategory {
    std::string label;
    std::string action;
    WaveformSpec spec;
    AuditOptions options;
};

// The six field categories used by the robot (locomotion, function, magnetize step/ramp,
// demagnetize, remote heating).
std::vector<SafetyCategory> standard_categories();

std::string format_report_text(const std::vector<SafetyReport>& reports);
std::string format_report_kv(const std::vector<SafetyReport>& reports);

}  // namespace magbot
