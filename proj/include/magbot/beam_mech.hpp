#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "magbot/fieldspace.hpp"
#include "magbot/robot_model.hpp"

namespace magbot {

enum class Shape { UprightU, InvertedU };

std::string shape_name(Shape s);
Shape shape_from_name(const std::string& s);

struct TentacleParams {
    double E = 3.96e5;        // Pa
    double I = 0.0;           // m^4
    double M = 37.5e3;        // A/m
    double l_tent = 4.4e-3;   // m, full length; each half is l_tent/2
    double A = 0.0;           // m^2

    static TentacleParams from_robot(const Robot& r);
    void validate() const;
};

struct TentacleDeflection {
    std::vector<double> s;       // [0, l_tent/2]
    std::vector<double> gamma;   // rad
    std::vector<double> dgamma;  // rad/m
    double applied_b = 0.0;
    Shape shape = Shape::InvertedU;
    double residual = 0.0;       // |gamma(0)| after shooting
    int iterations = 0;

    double tip_angle() const { return gamma.back(); }
    double gamma_at(double s) const;
    // Tip position of the right half relative to its root (y outward, z up).
    std::pair<double, double> tip_offset() const;
    // Straight-line tip-to-tip distance of the two halves.
    double chord() const;
};

struct ShootingOptions {
    int steps = 256;
    int max_iterations = 200;
    double tolerance = 1e-13;
};

// EI gamma'' = M b_z A cos(gamma), gamma(0) = 0, gamma'(l/2) = 0.
TentacleDeflection solve_tentacle(double b_z, const TentacleParams& p, const ShootingOptions& opt = {});

// Convert a solved half-profile to a robot Deflection with n segments per half.
Deflection to_deflection(const TentacleDeflection& t, int n_segments);

struct InnerBeamParams {
    double E = 5.70e5;
    double I = 2.43e-17;
    double moment = 0.0;  // lumped M V, A m^2
    double length = 0.5e-3;

    static InnerBeamParams from_robot(const Robot& r);
};

// Root of m B sin(gamma + pi/3) = EI gamma / l on [0, pi/2).
double solve_inner_beam(double b_func, const InnerBeamParams& p);

// Field at which the inner beam reaches gamma_contact.
double inner_contact_field(const InnerBeamParams& p, double gamma_contact);

struct CharacterizationKnown {
    double v_sample = 0.0;  // m^3
    double l_beam = 0.0;    // m
    std::optional<double> ei;
    std::optional<double> m_sample;
};

struct CharacterizationFit {
    double slope = 0.0;     // rad/T
    double derived = 0.0;   // EI (N m^2) or M (A/m), whichever was unknown
    bool derived_is_ei = false;
    double residual = 0.0;  // RMS of (y - slope x) / max|y|
};

// measurements: (gamma_tip rad, |B| tesla)
CharacterizationFit characterize(const std::vector<std::pair<double, double>>& measurements,
                                 const CharacterizationKnown& known);

// Synthetic gamma with gamma sec(gamma) = slope * b.
double gamma_from_slope(double slope, double b);

Vec3 deviation_direction(Mode mode, Shape shape, double xi);

struct OpeningCurve {
    Mode mode = Mode::DrugDispensing;
    double threshold_b = 0.0;                        // T
    std::vector<std::pair<double, double>> samples;  // (|B| T, opening m), ascending
    double max_opening = 0.0;                        // m

    void validate() const;
};

OpeningCurve default_opening_curve(Mode mode);
// CSV with header b_mT,value; value in micrometres. The first row is the threshold.
OpeningCurve load_opening_curve(const std::string& path, Mode mode);

double opening(Mode mode, double b_func, const OpeningCurve& curve);

// Deviation angle lookup keyed by (mode, shape), linear in |B|.
class DeviationTable {
public:
    DeviationTable();
    void set(Mode mode, Shape shape, std::vector<std::pair<double, double>> samples);
    // CSV with header b_mT,value; value in degrees.
    void load(const std::string& path, Mode mode, Shape shape);
    double xi(Mode mode, Shape shape, double b) const;

private:
    std::map<std::pair<int, int>, std::vector<std::pair<double, double>>> tables_;
};

// Piecewise-linear interpolation with end clamping; samples ascending in x.
double interp_clamped(const std::vector<std::pair<double, double>>& s, double x);

}  // namespace magbot
