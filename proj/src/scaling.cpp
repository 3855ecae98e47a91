#include "magbot/scaling.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "magbot/waveform.hpp"

namespace magbot {

void ScalePlan::validate() const {
    auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!ok(lambda_body) || !ok(lambda_tent) || (lambda_width && !ok(*lambda_width)))
        throw std::invalid_argument("scale plan: factors must be positive and finite");
}

ScalePlan compose(const ScalePlan& a, const ScalePlan& b) {
    ScalePlan c;
    c.lambda_body = a.lambda_body * b.lambda_body;
    c.lambda_tent = a.lambda_tent * b.lambda_tent;
    if (a.lambda_width || b.lambda_width) c.lambda_width = a.width() * b.width();
    return c;
}

double wrench_scale(const ScalePlan& p) {
    p.validate();
    return p.lambda_body * p.lambda_body * p.lambda_body;
}

double area_scale(const ScalePlan& p) { return wrench_scale(p); }

double pressure_parity(const ScalePlan& p) { return wrench_scale(p) / area_scale(p); }

double inner_thickness(const ScalePlan& p, double h_old) {
    p.validate();
    if (!(h_old > 0.0)) throw std::invalid_argument("inner_thickness: h must be > 0");
    return p.lambda_body * h_old;
}

double tentacle_thickness(const ScalePlan& p, double h_old) {
    p.validate();
    if (!(h_old > 0.0)) throw std::invalid_argument("tentacle_thickness: h must be > 0");
    return p.lambda_tent * h_old;
}

Capacities capacities(const ScalePlan& p, const CapacityData& d) {
    const double v = wrench_scale(p);
    Capacities c;
    c.drug_volume = d.drug_volume * v;
    c.sample_volume = d.sample_volume * v;
    c.cutter_area = d.cutter_area * area_scale(p);
    c.heating_ratio = p.lambda_body;
    c.drug_ok = c.drug_volume >= d.drug_required;
    c.sample_ok = c.sample_volume >= d.sample_required;
    c.cutter_ok = d.tool_area <= c.cutter_area;
    return c;
}

Robot scale_robot(const Robot& r, const ScalePlan& p) {
    p.validate();
    const double lb = p.lambda_body, lt = p.lambda_tent, lw = p.width();
    const double v = lb * lb * lb;
    Robot s = r;
    Geometry& g = s.geom;
    g.z_tent *= lb;
    g.t_tent *= lt;
    g.b_tent *= lb;
    g.l_tent *= lt;
    g.z_six *= lb;
    g.y_six1 *= lb;
    g.y_six2 *= lb;
    g.v_six *= v;
    g.z_main *= lb;
    for (int i = 0; i < 3; ++i) {
        g.x_inner[i] *= lb;
        g.y_inner[i] *= lb;
    }
    g.v_inner *= v;
    g.z_rprog *= lb;
    g.v_rprog *= v;
    g.z_heat *= lb;
    g.v_heat *= v;
    // I = b h^3 / 12 with h scaled by lambda_body
    s.inner_beam.second_moment *= lw * v;
    s.inner_beam.length *= lb;
    s.mass_kg *= v;
    if (s.com_override) *s.com_override *= lb;
    return s;
}

std::string format_scale_table(const ScalePlan& p, const CapacityData& d) {
    const Capacities c = capacities(p, d);
    std::ostringstream os;
    auto row = [&](const char* name, double value, const char* unit, const std::string& status) {
        os << name << ',' << format_sig9(value) << ',' << unit << ',' << status << '\n';
    };
    auto pf = [](bool b) { return std::string(b ? "PASS" : "FAIL"); };
    os << "quantity,value,unit,status\n";
    row("lambda_body", p.lambda_body, "1", "-");
    row("lambda_tent", p.lambda_tent, "1", "-");
    row("wrench_scale", wrench_scale(p), "1", "-");
    row("inner_thickness_60um", inner_thickness(p, 60e-6) * 1e6, "um", "-");
    row("inner_thickness_20um", inner_thickness(p, 20e-6) * 1e6, "um", "-");
    row("tentacle_thickness", tentacle_thickness(p, 150e-6) * 1e6, "um", "-");
    row("drug_volume", c.drug_volume * 1e9, "mm3", pf(c.drug_ok));
    row("sample_volume", c.sample_volume * 1e9, "mm3", pf(c.sample_ok));
    row("cutter_area", c.cutter_area * 1e6, "mm2", pf(c.cutter_ok));
    row("heating_ratio", c.heating_ratio, "1", "-");
    row("pressure_parity", pressure_parity(p), "1", "-");
    return os.str();
}

}  // namespace magbot
