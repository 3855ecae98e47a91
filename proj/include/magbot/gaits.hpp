#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "magbot/actuation.hpp"
#include "magbot/robot_model.hpp"
#include "magbot/waveform.hpp"

namespace magbot {

enum class GaitKind { RollLength, RollWidth, TwoAnchorCrawl, SpinWalk };
std::string gait_kind_name(GaitKind k);
GaitKind gait_kind_from_name(const std::string& s);

enum class RollAxis { Length, Width };

// Piecewise-linear sixth-DOF angle (heading) schedule, (t s, theta rad), clamped at the ends.
struct SteerProfile {
    std::vector<std::pair<double, double>> points;

    static SteerProfile constant(double theta) { return {{{0.0, theta}}}; }
    double at(double t) const;
};

enum class StrideSource { Calibrated, Geometry };

struct GaitConfig {
    int samples_per_period = 200;
    double k2 = 0.4;
    double circumference_length = 6.75e-3;  // m
    double circumference_width = 6.21e-3;   // m
    double max_roll_frequency = 1.0;        // Hz
    double max_crawl_frequency = 2.5;       // Hz
    double crawl_stride = 0.742e-3;         // m per cycle
    StrideSource stride_source = StrideSource::Calibrated;
    double crawl_b_high = 22e-3;            // T
    double crawl_b_low = 8e-3;              // T
    double crawl_tilt = 32.0 * kPi / 180.0; // rad
    std::array<double, 5> crawl_phase_fractions{0.2, 0.2, 0.2, 0.2, 0.2};
    int spin_samples_per_step = 100;
    std::array<double, 3> step_out{16.5, 16.1, 1.56};  // rad/s about body X, Y, Z
    CoilLimits coil;

    void validate() const;
};

enum class Kinematics { None, Rolling, Stride };

// One keyframe of the commanded motion. Keyframes include the end point;
// the waveform drops it so that consecutive gaits do not repeat a time stamp.
struct PlanSample {
    double t = 0.0;
    Mat3 orientation = Mat3::Identity();  // desired local -> global
    double b_magnitude = 0.0;
    double theta = 0.0;                   // sixth-DOF angle used for the field solve
    Kinematics kinematics = Kinematics::None;
    double circumference = 0.0;           // rolling, m
    double stride_increment = 0.0;        // crawl displacement earned since the previous keyframe, m
};

struct GaitPlan {
    GaitKind kind = GaitKind::RollLength;
    Mode mode = Mode::Locomotion;
    double b_magnitude = 0.0;  // peak, T
    double frequency = 0.0;    // Hz
    int cycles = 0;
    SteerProfile steer;
    std::vector<PlanSample> keyframes;
    Waveform waveform;

    double duration() const { return keyframes.empty() ? 0.0 : keyframes.back().t - keyframes.front().t; }
};

GaitPlan plan_roll(RollAxis axis, double b, double f_roll, double duration, const SteerProfile& steer,
                   const Robot& robot, const GaitConfig& cfg = {});
GaitPlan plan_crawl(int cycles, double f_crawl, const Robot& robot, const GaitConfig& cfg = {},
                    const SteerProfile& steer = SteerProfile::constant(0.0));
// Quarter rotations alternating about body X and Y, each lasting 1/(4 f).
GaitPlan plan_spin_walk(int steps, Mode mode, double b, double f, const Robot& robot,
                        const GaitConfig& cfg = {}, const SteerProfile& steer = SteerProfile::constant(0.0));

// Tentacle tip-to-tip chord at b_low minus at b_high.
double crawl_stride_from_geometry(const Robot& robot, const GaitConfig& cfg = {}, double tilt = 0.0);

inline double ideal_roll_speed(double circumference, double f) { return circumference * f; }
inline double ideal_crawl_speed(double stride, double f) { return stride * f; }

struct SimEnv {
    double slip_factor = 0.0;
    bool gravity = true;  // keeps the robot on the substrate
    double substrate_z = 0.0;

    static SimEnv ideal() { return {}; }
    static SimEnv preset(const std::string& name);
    void validate() const;
};

enum TrajectoryFlag : unsigned { kFlagNone = 0, kFlagStepOut = 1u };

struct TrajectorySample {
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    Mat3 orientation = Mat3::Identity();
    double tip_angle = 0.0;  // tentacle tip angle, rad
    unsigned flags = kFlagNone;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;

    bool empty() const { return samples.empty(); }
    Vec3 displacement() const;
    bool any_step_out() const;
    // Shift other by t0 and append, skipping samples that do not advance time.
    void append(const Trajectory& other, double t0);
};

Trajectory simulate(const GaitPlan& plan, const Robot& robot, const SimEnv& env,
                    const GaitConfig& cfg = {}, const Vec3& start = Vec3::Zero());

inline const char* kTrajectoryCsvHeader = "t,x,y,z,roll,pitch,yaw,flags";
void write_trajectory_csv(const Trajectory& tr, std::ostream& os);
void emit_trajectory_csv(const Trajectory& tr, const std::string& path);

}  // namespace magbot
