#pragma once

#include "magbot/fieldspace.hpp"
#include "magbot/robot_model.hpp"
#include "magbot/waveform.hpp"

namespace magbot {

struct ReprogramParams {
    double b_mag = 60e-3;     // T
    double k_ramp = 12.0;     // T/s
    double pulse = 5e-3;      // s, step magnetizing duration
    double b_demag = 65e-3;   // T
    double k_demag = 2e-3;    // T per period
    double f_demag = 45.0;    // Hz
    double r_coil = 2.5;      // ohm
    double l_coil = 1.9e-4;   // H
};

enum class ReprogramKind { StepMagnetize, RampMagnetize, Demagnetize };

std::string reprogram_kind_name(ReprogramKind k);

// End of the demagnetizing envelope, B_demag / (K_demag f_demag).
double demag_end_time(const ReprogramParams& p);
double demag_waveform(double t, const ReprogramParams& p = {});
double magnetize_waveform(ReprogramKind kind, double t, const ReprogramParams& p = {});

struct ReprogramWaveform {
    ReprogramKind kind = ReprogramKind::Demagnetize;
    Vec3 direction = Vec3::UnitX();
    ReprogramParams params;

    double t_end() const;
    double peak() const;
    double value(double t) const;
    // Uniform samples every dt over [0, t_end], tagged with the safety category.
    Waveform sample(double dt) const;
    std::string category() const;
};

ReprogramWaveform make_magnetize(ReprogramKind kind, double phi, const ReprogramParams& p = {});
ReprogramWaveform make_demagnetize(const ReprogramParams& p = {});

// Coercivity-gated state transition. Throws SafetyRefusal if the peak field would
// remagnetize a hard component.
MagnetizationState apply_reprogram(const MagnetizationState& s, const ReprogramWaveform& w,
                                   const Materials& mat);

struct ThermalState {
    double temperature = 26.3;   // degC
    double mass = 5.26e-6;       // kg
    double specific_heat = 661;  // J/(kg K)
    double heat_power = 1.36e-3; // W
    double ambient = 26.3;       // degC
    double tau_cool = 30.0;      // s
};

ThermalState heat_step(const ThermalState& ts, double dt, bool field_on);

enum class HeatingMaterial { Heat, Rprog };
// Ratio of heating power of a to b, from the measured equal-rise times (15 s vs 60 s).
double heating_power_ratio(HeatingMaterial a, HeatingMaterial b);

}  // namespace magbot
