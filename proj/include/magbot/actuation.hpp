#pragma once

#include <optional>

#include "magbot/beam_mech.hpp"
#include "magbot/fieldspace.hpp"
#include "magbot/robot_model.hpp"

namespace magbot {

struct Wrench {
    Vec3 torque = Vec3::Zero();  // N m
    Vec3 force = Vec3::Zero();   // N
    Frame frame = Frame::Local;

    Vec6 as_vector() const;
};

// Direct dipole sum: torque = sum m x B + r x (G m), force = sum G m.
Wrench wrench(const DipoleList& local_dipoles, const FieldState& fs);

// Exact 6x8 linear map [B; grad] -> wrench of a dipole set.
Mat68 wrench_matrix(const DipoleList& local_dipoles);

struct DCoefficients {
    double d2 = 0, d5 = 0, d6 = 0, d8 = 0, d9 = 0, d12 = 0, d15 = 0;
};

DCoefficients d_coefficients(const DipoleList& local_dipoles);

struct DesignMatrix {
    Mat68 m = Mat68::Zero();
    Mode mode = Mode::Locomotion;
    double moment_magnitude = 0.0;
    DCoefficients d;
};

DesignMatrix design_matrix(Mode mode, double moment_magnitude, const DCoefficients& d);

Mat68 control_matrix(const DesignMatrix& d, double theta);

// e3: pure B_z.
Vec8 null_vector_1();
// Second null vector in unit-bounded form, oriented so that positive k2 restores.
Vec8 null_vector_2(const DesignMatrix& d, double theta);

struct SolveOptions {
    double rank_cutoff = 1e-12;  // relative to the largest singular value
    double residual_tol = 1e-9;
};

// Particular (least-norm) solution for zero torque and the given force, plus k1 n1 + k2 n2.
FieldState solve_fields(const DesignMatrix& d, double theta, const Vec3& force, double k1, double k2,
                        const SolveOptions& opt = {});

// Wrench (intermediate frame) on a robot sitting at theta_actual under fields fs.
Wrench restoring_torque(const DesignMatrix& d, double theta_actual, const FieldState& fs);

// Shape-dependent actuation data for a robot state at a given field magnitude.
struct ActuationModel {
    Shape shape = Shape::InvertedU;
    double b_magnitude = 0.0;
    std::optional<TentacleDeflection> tentacle;
    Deflection deflection;
    DipoleList material_dipoles;
    DipoleList local_dipoles;
    Vec3 net_moment_material = Vec3::Zero();
    Mat3 local_axes = Mat3::Identity();  // columns: local axes in the material frame
    Vec3 origin = Vec3::Zero();
    DesignMatrix design;
};

// Locomotion: tentacles solved at +-|B| along Z_M (sign from shape).
// Function modes: tentacles undeformed, inner beams deflected towards the field.
ActuationModel build_actuation(const Robot& robot, double b_magnitude, Shape shape,
                               const ProfileOptions& opt = {});

}  // namespace magbot
