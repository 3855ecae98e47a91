#pragma once

#include <Eigen/Dense>
#include <string>

namespace magbot {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat68 = Eigen::Matrix<double, 6, 8>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

enum class Frame { Global, Intermediate, Local };

std::string frame_name(Frame f);
Frame frame_from_name(const std::string& s);

// Flux density plus the five independent gradients, wire order
// [dBz/dx, dBz/dy, dBz/dz, dBy/dy, dBx/dy].
struct FieldState {
    Vec3 b = Vec3::Zero();
    Vec5 grad = Vec5::Zero();
    Frame frame = Frame::Global;

    Vec8 as_vector() const;
    static FieldState from_vector(const Vec8& v, Frame f);
};

// G(i,j) = dB_i/dx_j, symmetric and traceless.
Mat3 gradient_matrix(const Vec5& grad);
Vec5 gradient_vector(const Mat3& g);

enum class Axis { X, Y, Z };

class Rotation {
public:
    Rotation();
    // Re-orthonormalizes; throws std::invalid_argument if m is far from a rotation.
    static Rotation from_matrix(const Mat3& m);

    const Mat3& matrix() const { return m_; }
    int compositions() const { return count_; }

    Rotation operator*(const Rotation& o) const;
    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    Rotation inverse() const;

    double orthonormality_defect() const;
    double det() const { return m_.determinant(); }

    static constexpr int kReorthoInterval = 64;

private:
    Mat3 m_;
    int count_ = 0;
};

Rotation rot_axis(Axis axis, double angle);
Mat3 gram_schmidt(const Mat3& m);

// Rotation vector (axis * angle) of R.
Vec3 rotation_log(const Mat3& r);

// Gradient map of the intermediate->global frame change R = Rx(alpha) Ry(beta).
Mat5 a2_matrix(double alpha, double beta);

FieldState map_to_global(double alpha, double beta, const FieldState& fs);

// General change of frame: b' = R b, G' = R G R^T.
FieldState rotate_field(const Mat3& r, const FieldState& fs, Frame to);

// The 8x8 intermediate->local map for a sixth-DOF angle theta.
Mat8 a_theta(double theta);

// R = Rx(alpha) Ry(beta) Rz(theta); theta = 0 at gimbal lock.
struct XyzAngles {
    double alpha = 0.0, beta = 0.0, theta = 0.0;
};
XyzAngles decompose_xyz(const Mat3& r);

// R = Rz(yaw) Ry(pitch) Rx(roll), for reporting poses.
struct RollPitchYaw {
    double roll = 0.0, pitch = 0.0, yaw = 0.0;
};
RollPitchYaw euler_zyx(const Mat3& r);

// Spectral norm of the full gradient tensor.
double gradient_norm(const Vec5& grad);

}  // namespace magbot
