#pragma once

#include <optional>
#include <string>

#include "magbot/robot_model.hpp"

namespace magbot {

struct ScalePlan {
    double lambda_body = 2.07 / 2.50;
    double lambda_tent = 2.5 / 4.4;
    // Width factor of the inner beams; defaults to lambda_body.
    std::optional<double> lambda_width;

    static ScalePlan identity() { return {1.0, 1.0, std::nullopt}; }
    double width() const { return lambda_width.value_or(lambda_body); }
    void validate() const;
};

// Apply a then b.
ScalePlan compose(const ScalePlan& a, const ScalePlan& b);

// Baseline capacities and the task requirements they are compared against (SI units).
struct CapacityData {
    double drug_volume = 0.230e-9;     // m^3
    double sample_volume = 0.064e-9;   // m^3
    double cutter_area = 1.47e-10;     // m^2
    double drug_required = 0.115e-9;   // m^3
    double sample_required = 0.0359e-9;
    double tool_area = 7.85e-11;       // m^2, smallest available 5 um cutting tool
};

double wrench_scale(const ScalePlan& p);
double area_scale(const ScalePlan& p);
// Force scale over area scale of the cutter.
double pressure_parity(const ScalePlan& p);
double inner_thickness(const ScalePlan& p, double h_old);
double tentacle_thickness(const ScalePlan& p, double h_old);

struct Capacities {
    double drug_volume = 0.0;
    double sample_volume = 0.0;
    double cutter_area = 0.0;
    double heating_ratio = 0.0;  // generated / transferred heat, relative to baseline
    bool drug_ok = false;
    bool sample_ok = false;
    bool cutter_ok = false;      // the available tool is no larger than the target area
};

Capacities capacities(const ScalePlan& p, const CapacityData& data = {});

// Scaled copy of a robot: body lengths by lambda_body, tentacle thickness and length by
// lambda_tent, volumes and mass by lambda_body^3, inner-beam width by lambda_width.
Robot scale_robot(const Robot& r, const ScalePlan& p);

std::string format_scale_table(const ScalePlan& p, const CapacityData& data = {});

}  // namespace magbot
