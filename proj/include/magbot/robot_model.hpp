#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magbot/fieldspace.hpp"

namespace magbot {

enum class Mode { Locomotion, DrugDispensing, Cutting, GrippingStorage };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& s);
bool is_function_mode(Mode m);
// Programming angle of a function mode, radians. Locomotion throws.
double mode_phi(Mode m);
// Inverse of mode_phi within 1e-6 rad; unknown angles throw.
Mode mode_from_phi(double phi);

struct MaterialSpec {
    std::string name;
    std::optional<double> youngs_modulus;  // Pa
    std::optional<double> coercivity_hci;  // T
    double m_magnetized = 0.0;             // A/m, 0 for non-magnetic
    std::optional<double> m_demagnetized;  // A/m

    bool magnetic() const { return m_magnetized > 0.0; }
    void validate() const;
};

struct Materials {
    MaterialSpec heat, body, inner, rprog, sixth, tentacle;
    void validate() const;
    // Smallest coercivity among the hard components, T.
    double min_hard_coercivity() const;
};

// All lengths in metres, volumes in cubic metres.
struct Geometry {
    double z_tent = -1.055e-3;  // top edge of the soft tentacles
    double t_tent = 0.15e-3;
    double b_tent = 1.5e-3;
    double l_tent = 4.4e-3;
    double z_six = -0.905e-3;
    double y_six1 = -0.531e-3;
    double y_six2 = 0.531e-3;
    double v_six = 0.491e-9;
    double z_main = 0.175e-3;
    std::array<double, 3> x_inner{-0.52e-3, 0.52e-3, 0.0};
    std::array<double, 3> y_inner{0.3e-3, 0.3e-3, -0.6e-3};
    double v_inner = 0.0208e-9;
    double z_rprog = -0.59e-3;
    double v_rprog = 2.6e-9;
    double z_heat = 0.94e-3;
    double v_heat = 2.6e-9;

    double tentacle_volume() const { return b_tent * t_tent * l_tent; }
    double tentacle_centre_z() const { return z_tent - 0.5 * t_tent; }
    void validate() const;
};

// Inner (drug-door) beam parameters.
struct InnerBeamSpec {
    double youngs_modulus = 5.70e5;   // Pa
    double second_moment = 2.43e-17;  // m^4
    double length = 0.5e-3;           // m
    // Calibrated so the contact field is 1.63 mT with the values above.
    double gamma_contact = 0.12164440169175603;  // rad
};

struct MagnetizationState {
    double m_tent = 37.5e3;   // A/m
    double m_six = 88.7e3;
    double m_inner = 108e3;
    double m_rprog = 1.19e3;  // magnitude, A/m
    double m_heat = 0.766e3;
    double phi = 0.0;         // programming angle, rad (0 when demagnetized)
    bool programmable_magnetized = false;
    Mode mode = Mode::Locomotion;

    bool operator==(const MagnetizationState&) const = default;
};

struct Robot {
    Geometry geom;
    Materials mat;
    MagnetizationState mag;
    InnerBeamSpec inner_beam;
    double mass_kg = 16.6e-6;  // not a measured value; used for weight compensation
    int n_segments = 64;       // per tentacle half
    std::optional<Vec3> com_override;
};

Robot default_robot();
Materials default_materials();

struct Dipole {
    Vec3 r = Vec3::Zero();  // m
    Vec3 m = Vec3::Zero();  // A m^2
    double volume = 0.0;    // m^3
    std::string component;
};
using DipoleList = std::vector<Dipole>;

struct ProfileOptions {
    int n_segments = 64;
    bool include_residual = false;  // keep demagnetized programmable moments
};

// Deformation state. gamma_right/left are sampled at segment midpoints.
struct Deflection {
    std::vector<double> gamma_right;
    std::vector<double> gamma_left;
    std::array<double, 3> inner{0.0, 0.0, 0.0};  // rotation of each inner magnet about Z, rad

    static Deflection none(int n);
    static Deflection uniform(int n, double gamma);
    static Deflection symmetric(int n, double half_length, const std::function<double(double)>& gamma_of_s);
};

// Undeformed material-frame magnetization profile.
DipoleList profile_moments(const MagnetizationState& state, const Geometry& geom,
                           const ProfileOptions& opt = {});

// Deformed profile: tentacle segments follow the deflected centreline, inner magnets rotated.
DipoleList deformed_profile(const MagnetizationState& state, const Geometry& geom,
                            const Deflection& def, const ProfileOptions& opt = {});

Vec3 net_moment(const MagnetizationState& state, const Geometry& geom, const Deflection& def,
                const ProfileOptions& opt = {});

Vec3 moment_sum(const DipoleList& d);

// Volume-weighted centroid of the magnetic components.
Vec3 centre_of_mass(const Geometry& geom);

// Local frame axes (columns) expressed in the material frame: Z along the net moment.
Mat3 local_frame(const Vec3& moment_material);

// Express a material-frame profile in a local frame about the given origin.
DipoleList to_local(const DipoleList& d, const Vec3& origin, const Mat3& local_axes);

// Signed inner-beam rotations that turn the two off-axis magnets towards the
// function-mode field direction by gamma.
std::array<double, 3> inner_deflections_for(Mode mode, double gamma, const Geometry& geom);

// Unit inward directions of the three inner magnets (material frame).
std::array<Vec3, 3> inner_directions(const Geometry& geom);

}  // namespace magbot
