#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "magbot/fieldspace.hpp"

namespace magbot {

struct WaveformSample {
    double t = 0.0;  // s
    FieldState fs;
    std::string tag;
};

struct Waveform {
    std::string category;
    std::vector<WaveformSample> samples;

    bool empty() const { return samples.empty(); }
    size_t size() const { return samples.size(); }
    double duration() const;
    // Append another waveform, shifting its times to start at t0.
    void append(const Waveform& other, double t0);
};

inline const char* kWaveformCsvHeader =
    "t_s,Bx_T,By_T,Bz_T,dBzdx_Tpm,dBzdy_Tpm,dBzdz_Tpm,dBydy_Tpm,dBxdy_Tpm,frame,tag";

// Fixed 9-significant-digit scientific formatting, locale independent.
std::string format_sig9(double v);

void write_waveform_csv(const Waveform& w, std::ostream& os);
void emit_waveform_csv(const Waveform& w, const std::string& path);
Waveform read_waveform_csv(std::istream& is);
Waveform parse_waveform_csv(const std::string& path);

// Coil capacity: every sample |B| <= b_max and gradient spectral norm <= grad_max.
struct CoilLimits {
    double b_max = 34e-3;
    double grad_max = 0.4;
};
// Returns the index of the first violating sample, or -1.
long first_coil_violation(const Waveform& w, const CoilLimits& lim, double tol = 1e-12);

}  // namespace magbot
