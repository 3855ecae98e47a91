#include "magbot/waveform.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "magbot/errors.hpp"

namespace magbot {

double Waveform::duration() const {
    if (samples.size() < 2) return 0.0;
    return samples.back().t - samples.front().t;
}

void Waveform::append(const Waveform& other, double t0) {
    for (const auto& s : other.samples) {
        WaveformSample c = s;
        c.t = t0 + s.t;
        samples.push_back(std::move(c));
    }
}

std::string format_sig9(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

namespace {

std::string clean_tag(const std::string& t) {
    std::string out = t;
    for (char& c : out)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return out;
}

double parse_double(const std::string& s, int line) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw ConfigError("waveform csv line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

}  // namespace

void write_waveform_csv(const Waveform& w, std::ostream& os) {
    os << kWaveformCsvHeader << '\n';
    for (const auto& s : w.samples) {
        os << format_sig9(s.t);
        for (int i = 0; i < 3; ++i) os << ',' << format_sig9(s.fs.b[i]);
        for (int i = 0; i < 5; ++i) os << ',' << format_sig9(s.fs.grad[i]);
        os << ',' << frame_name(s.fs.frame) << ',' << clean_tag(s.tag) << '\n';
    }
}

void emit_waveform_csv(const Waveform& w, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    write_waveform_csv(w, os);
    os.flush();
    if (!os) throw IoError("write failed: " + path);
}

Waveform read_waveform_csv(std::istream& is) {
    Waveform w;
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line)) throw ConfigError("waveform csv: missing header");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kWaveformCsvHeader) throw ConfigError("waveform csv: unexpected header");
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (line.back() == ',') cols.emplace_back();
        if (cols.size() != 11)
            throw ConfigError("waveform csv line " + std::to_string(lineno) + ": expected 11 columns");
        WaveformSample s;
        s.t = parse_double(cols[0], lineno);
        for (int i = 0; i < 3; ++i) s.fs.b[i] = parse_double(cols[1 + i], lineno);
        for (int i = 0; i < 5; ++i) s.fs.grad[i] = parse_double(cols[4 + i], lineno);
        try {
            s.fs.frame = frame_from_name(cols[9]);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("waveform csv line " + std::to_string(lineno) + ": " + e.what());
        }
        s.tag = cols[10];
        w.samples.push_back(std::move(s));
    }
    return w;
}

Waveform parse_waveform_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    return read_waveform_csv(is);
}

long first_coil_violation(const Waveform& w, const CoilLimits& lim, double tol) {
    for (size_t i = 0; i < w.samples.size(); ++i) {
        const auto& fs = w.samples[i].fs;
        if (fs.b.norm() > lim.b_max * (1 + tol) || gradient_norm(fs.grad) > lim.grad_max * (1 + tol))
            return static_cast<long>(i);
    }
    return -1;
}

}  // namespace magbot
