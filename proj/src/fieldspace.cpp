#include "magbot/fieldspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magbot {

std::string frame_name(Frame f) {
    switch (f) {
    case Frame::Global: return "global";
    case Frame::Intermediate: return "intermediate";
    case Frame::Local: return "local";
    }
    return "global";
}

Frame frame_from_name(const std::string& s) {
    if (s == "global") return Frame::Global;
    if (s == "intermediate") return Frame::Intermediate;
    if (s == "local") return Frame::Local;
    throw std::invalid_argument("unknown frame: " + s);
}

Vec8 FieldState::as_vector() const {
    Vec8 v;
    v << b, grad;
    return v;
}

FieldState FieldState::from_vector(const Vec8& v, Frame f) {
    FieldState fs;
    fs.b = v.head<3>();
    fs.grad = v.tail<5>();
    fs.frame = f;
    return fs;
}

Mat3 gradient_matrix(const Vec5& g) {
    if (!g.allFinite()) throw std::invalid_argument("gradient_matrix: non-finite gradient");
    Mat3 m;
    const double gxx = -g[3] - g[2];
    m << gxx, g[4], g[0],
         g[4], g[3], g[1],
         g[0], g[1], g[2];
    return m;
}

Vec5 gradient_vector(const Mat3& m) {
    // average symmetric pairs so tiny asymmetry from roundoff is not amplified
    Vec5 g;
    g << 0.5 * (m(2, 0) + m(0, 2)), 0.5 * (m(2, 1) + m(1, 2)), m(2, 2), m(1, 1),
        0.5 * (m(0, 1) + m(1, 0));
    return g;
}

Rotation::Rotation() : m_(Mat3::Identity()) {}

Mat3 gram_schmidt(const Mat3& m) {
    Vec3 c0 = m.col(0).normalized();
    Vec3 c1 = m.col(1) - c0.dot(m.col(1)) * c0;
    c1.normalize();
    Vec3 c2 = c0.cross(c1);
    Mat3 out;
    out << c0, c1, c2;
    return out;
}

Rotation Rotation::from_matrix(const Mat3& m) {
    if (!m.allFinite()) throw std::invalid_argument("Rotation: non-finite matrix");
    const double defect = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (defect > 1e-6 || m.determinant() <= 0.0)
        throw std::invalid_argument("Rotation: matrix is not a proper rotation");
    Rotation r;
    r.m_ = gram_schmidt(m);
    return r;
}

Rotation Rotation::operator*(const Rotation& o) const {
    Rotation r;
    r.m_ = m_ * o.m_;
    r.count_ = count_ + o.count_ + 1;
    if (r.count_ > kReorthoInterval) {
        r.m_ = gram_schmidt(r.m_);
        r.count_ = 0;
    }
    return r;
}

Rotation Rotation::inverse() const {
    Rotation r;
    r.m_ = m_.transpose();
    r.count_ = count_;
    return r;
}

double Rotation::orthonormality_defect() const {
    return (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Rotation rot_axis(Axis axis, double a) {
    if (!std::isfinite(a)) throw std::invalid_argument("rot_axis: non-finite angle");
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    switch (axis) {
    case Axis::X: m << 1, 0, 0, 0, c, -s, 0, s, c; break;
    case Axis::Y: m << c, 0, s, 0, 1, 0, -s, 0, c; break;
    case Axis::Z: m << c, -s, 0, s, c, 0, 0, 0, 1; break;
    }
    return Rotation::from_matrix(m);
}

Vec3 rotation_log(const Mat3& r) {
    Eigen::AngleAxisd aa(r);
    return aa.axis() * aa.angle();
}

Mat5 a2_matrix(double a, double b) {
    const double ca = std::cos(a), sa = std::sin(a);
    const double cb = std::cos(b), sb = std::sin(b);
    const double c2a = std::cos(2 * a), s2a = std::sin(2 * a);
    const double c2b = std::cos(2 * b), s2b = std::sin(2 * b);
    const double ca2 = ca * ca, sa2 = sa * sa, sb2 = sb * sb;
    Mat5 m;
    m << ca * c2b, sa * sb, ca * s2b, 0.5 * ca * s2b, sa * cb,
         0.5 * s2a * s2b, c2a * cb, -0.5 * s2a * c2b, 0.5 * s2a * (1 + sb2), -c2a * sb,
         -ca2 * s2b, s2a * cb, ca2 * c2b, sa2 - ca2 * sb2, -s2a * sb,
         -sa2 * s2b, -s2a * cb, sa2 * c2b, ca2 - sa2 * sb2, s2a * sb,
         -sa * c2b, ca * sb, -sa * s2b, -0.5 * sa * s2b, ca * cb;
    return m;
}

FieldState map_to_global(double alpha, double beta, const FieldState& fs) {
    if (fs.frame != Frame::Intermediate)
        throw std::invalid_argument("map_to_global: field must be in the intermediate frame");
    const Mat3 r = (rot_axis(Axis::X, alpha) * rot_axis(Axis::Y, beta)).matrix();
    FieldState out;
    out.b = r * fs.b;
    out.grad = a2_matrix(alpha, beta) * fs.grad;
    out.frame = Frame::Global;
    return out;
}

FieldState rotate_field(const Mat3& r, const FieldState& fs, Frame to) {
    FieldState out;
    out.b = r * fs.b;
    out.grad = gradient_vector(r * gradient_matrix(fs.grad) * r.transpose());
    out.frame = to;
    return out;
}

Mat8 a_theta(double t) {
    const double c = std::cos(t), s = std::sin(t);
    const double c2 = std::cos(2 * t), s2 = std::sin(2 * t);
    Mat8 a = Mat8::Zero();
    a(0, 0) = c;  a(0, 1) = s;
    a(1, 0) = -s; a(1, 1) = c;
    a(2, 2) = 1;
    a(3, 3) = c;  a(3, 4) = s;
    a(4, 3) = -s; a(4, 4) = c;
    a(5, 5) = 1;
    a(6, 5) = -s * s; a(6, 6) = c2; a(6, 7) = -s2;
    a(7, 5) = 0.5 * s2; a(7, 6) = s2; a(7, 7) = c2;
    return a;
}

XyzAngles decompose_xyz(const Mat3& r) {
    XyzAngles out;
    const double sb = std::clamp(r(0, 2), -1.0, 1.0);
    out.beta = std::asin(sb);
    const double cb = std::cos(out.beta);
    if (cb > 1e-9) {
        out.alpha = std::atan2(-r(1, 2), r(2, 2));
        out.theta = std::atan2(-r(0, 1), r(0, 0));
    } else {
        const double sgn = sb > 0 ? 1.0 : -1.0;
        out.alpha = std::atan2(sgn * r(1, 0), r(1, 1));
        out.theta = 0.0;
    }
    return out;
}

RollPitchYaw euler_zyx(const Mat3& r) {
    RollPitchYaw out;
    out.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
    if (std::cos(out.pitch) > 1e-9) {
        out.roll = std::atan2(r(2, 1), r(2, 2));
        out.yaw = std::atan2(r(1, 0), r(0, 0));
    } else {
        out.roll = 0.0;
        out.yaw = std::atan2(-r(0, 1), r(1, 1));
    }
    return out;
}

double gradient_norm(const Vec5& grad) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(gradient_matrix(grad), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace magbot
