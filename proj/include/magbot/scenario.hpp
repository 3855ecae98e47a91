#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magbot/beam_mech.hpp"
#include "magbot/gaits.hpp"
#include "magbot/reprogram_thermal.hpp"
#include "magbot/robot_model.hpp"
#include "magbot/safety.hpp"
#include "magbot/scaling.hpp"
#include "magbot/waveform.hpp"

namespace magbot {

enum class StepType { SetMode, Gait, Function, Heat, Wait };
std::string step_type_name(StepType t);

struct Step {
    StepType type = StepType::Wait;
    // SetMode: demagnetize, or magnetize to phi with the given method.
    bool demagnetize = false;
    double phi = 0.0;  // rad
    ReprogramKind method = ReprogramKind::RampMagnetize;
    // Gait
    GaitKind gait = GaitKind::RollLength;
    int cycles = 0;  // crawl cycles or spin-walk steps
    double frequency = 0.0;
    SteerProfile steer = SteerProfile::constant(0.0);
    // Gait / Function
    double b = 0.0;  // T
    Mode mode = Mode::Locomotion;
    // Gait (roll), Function, Heat, Wait
    double duration = 0.0;  // s
};

struct Scenario {
    Robot robot = default_robot();
    GaitConfig gait;
    ReprogramParams reprogram;
    ThermalState thermal;
    std::string env_name = "oil";
    SimEnv env = SimEnv::preset("oil");
    std::map<Mode, OpeningCurve> curves;  // missing modes use the default curves
    double reprogram_dt = 1e-4;            // s
    double function_fine_dt = 1e-4;        // s, while the coil current settles
    double function_coarse_dt = 1e-2;      // s
    double heat_dt = 0.5;                  // s, envelope samples of the heating field
    double heat_b = 9.34e-3;               // T
    double heat_f = 75.4e3;                // Hz
    double function_l = 6.3e-4;            // H
    double function_r = 0.79;              // ohm
    std::vector<Step> steps;

    const OpeningCurve& curve(Mode m) const;
    // Mode bookkeeping and parameter checks; throws ConfigError with the step index.
    void validate() const;
};

struct Event {
    double t = 0.0;
    int step = -1;
    std::string kind;  // magnetize, demagnetize, gait, function, heat, wait, threshold, step_out
    std::string detail;
};

struct SegmentAudit {
    int step = -1;
    SafetyReport report;
};

struct RunResult {
    Waveform waveform;
    Trajectory trajectory;
    std::vector<Event> events;
    std::vector<SegmentAudit> audits;
    MagnetizationState final_state;
    ThermalState final_thermal;

    bool safety_passed() const;
    // gait, function and demagnetize events, in order: "<kind>:<detail-head>"
    std::vector<std::string> activity() const;
};

// Executes all steps in memory. Nothing is written.
RunResult run(const Scenario& sc);

struct RunOutput {
    std::string waveform_path;
    std::string trajectory_path;
    std::string event_log_path;
    std::string safety_report_path;
};

std::string format_event_log(const std::vector<Event>& events);
std::string format_safety_report(const std::vector<SegmentAudit>& audits);
RunOutput write_outputs(const RunResult& r, const std::string& out_dir);

}  // namespace magbot
