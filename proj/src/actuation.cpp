#include "magbot/actuation.hpp"

#include <cmath>
#include <stdexcept>

#include "magbot/errors.hpp"

namespace magbot {

Vec6 Wrench::as_vector() const {
    Vec6 v;
    v << torque, force;
    return v;
}

Wrench wrench(const DipoleList& dip, const FieldState& fs) {
    if (fs.frame != Frame::Local) throw std::invalid_argument("wrench: field must be in the local frame");
    const Mat3 g = gradient_matrix(fs.grad);
    Wrench w;
    for (const auto& d : dip) {
        const Vec3 gm = g * d.m;
        w.torque += d.m.cross(fs.b) + d.r.cross(gm);
        w.force += gm;
    }
    w.frame = Frame::Local;
    return w;
}

Mat68 wrench_matrix(const DipoleList& dip) {
    Mat68 out;
    for (int j = 0; j < 8; ++j) {
        Vec8 e = Vec8::Zero();
        e[j] = 1.0;
        out.col(j) = wrench(dip, FieldState::from_vector(e, Frame::Local)).as_vector();
    }
    return out;
}

DCoefficients d_coefficients(const DipoleList& dip) {
    Mat3 s = Mat3::Zero();  // s(a, b) = sum r_a m_b
    for (const auto& d : dip) s += d.r * d.m.transpose();
    DCoefficients c;
    c.d2 = s(1, 1) - s(2, 2);
    c.d6 = s(2, 2) - s(0, 0);
    c.d15 = s(0, 0) - s(1, 1);
    c.d5 = -s(2, 0);
    c.d8 = -s(2, 0) - s(0, 2);
    c.d9 = -s(2, 0);
    c.d12 = s(0, 2);
    return c;
}

DesignMatrix design_matrix(Mode mode, double m, const DCoefficients& d) {
    if (!(m >= 0.0)) throw std::invalid_argument("design_matrix: moment magnitude must be >= 0");
    DesignMatrix out;
    out.mode = mode;
    out.moment_magnitude = m;
    out.d = d;
    Mat68& a = out.m;
    a.setZero();
    a(0, 1) = -m; a(0, 4) = d.d2;
    a(1, 0) = m;  a(1, 3) = d.d6;
    a(2, 7) = d.d15;
    a(3, 3) = m;
    a(4, 4) = m;
    a(5, 5) = m;
    if (mode == Mode::Cutting || mode == Mode::GrippingStorage) {
        a(0, 7) = d.d5;
        a(1, 5) = d.d8;
        a(1, 6) = d.d9;
        a(2, 4) = d.d12;
    }
    return out;
}

Mat68 control_matrix(const DesignMatrix& d, double theta) {
    const Mat3 rz = rot_axis(Axis::Z, theta).matrix();
    Mat6 blk = Mat6::Zero();
    blk.topLeftCorner<3, 3>() = rz;
    blk.bottomRightCorner<3, 3>() = rz;
    return blk * d.m * a_theta(theta);
}

Vec8 null_vector_1() {
    Vec8 n = Vec8::Zero();
    n[2] = 1.0;
    return n;
}

Vec8 null_vector_2(const DesignMatrix& d, double theta) {
    // A(theta)^-1 applied to the design-matrix null vector that carries dBy/dy
    const double v = d.moment_magnitude > 0 ? -d.m(1, 6) / d.moment_magnitude : 0.0;
    const double sign = d.d.d15 > 0 ? -1.0 : 1.0;
    Vec8 n = Vec8::Zero();
    n[0] = v * std::cos(theta);
    n[1] = v * std::sin(theta);
    n[6] = std::cos(2 * theta);
    n[7] = -std::sin(2 * theta);
    return sign * n;
}

FieldState solve_fields(const DesignMatrix& d, double theta, const Vec3& force, double k1, double k2,
                        const SolveOptions& opt) {
    const Mat68 c = control_matrix(d, theta);
    Eigen::JacobiSVD<Mat68> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv[0];
    if (!(smax > 0.0)) throw SolverFailure("solve_fields: control matrix is zero");
    for (int i = 0; i < 6; ++i)
        if (!(sv[i] > opt.rank_cutoff * smax))
            throw SolverFailure("solve_fields: control matrix is rank deficient", sv[i] / smax);

    Vec6 rhs;
    rhs << Vec3::Zero(), force;
    const Vec6 ut = svd.matrixU().transpose() * rhs;
    Vec8 y = Vec8::Zero();
    for (int i = 0; i < 6; ++i) y[i] = ut[i] / sv[i];
    Vec8 x = svd.matrixV() * y;

    const double res = (c * x - rhs).cwiseAbs().maxCoeff();
    if (!(res < opt.residual_tol)) throw SolverFailure("solve_fields: residual too large", res);

    x += k1 * null_vector_1() + k2 * null_vector_2(d, theta);
    return FieldState::from_vector(x, Frame::Intermediate);
}

Wrench restoring_torque(const DesignMatrix& d, double theta_actual, const FieldState& fs) {
    const Vec6 w = control_matrix(d, theta_actual) * fs.as_vector();
    Wrench out;
    out.torque = w.head<3>();
    out.force = w.tail<3>();
    out.frame = Frame::Intermediate;
    return out;
}

ActuationModel build_actuation(const Robot& robot, double b, Shape shape, const ProfileOptions& opt_in) {
    if (!(b >= 0.0)) throw std::invalid_argument("build_actuation: field magnitude must be >= 0");
    ProfileOptions opt = opt_in;
    opt.n_segments = robot.n_segments;
    ActuationModel am;
    am.shape = shape;
    am.b_magnitude = b;
    const Mode mode = robot.mag.mode;
    if (mode == Mode::Locomotion) {
        const double bz = shape == Shape::InvertedU ? b : -b;
        am.tentacle = solve_tentacle(bz, TentacleParams::from_robot(robot));
        am.deflection = to_deflection(*am.tentacle, opt.n_segments);
    } else {
        am.deflection = Deflection::none(opt.n_segments);
        const double g = solve_inner_beam(b, InnerBeamParams::from_robot(robot));
        am.deflection.inner = inner_deflections_for(mode, g, robot.geom);
    }
    am.material_dipoles = deformed_profile(robot.mag, robot.geom, am.deflection, opt);
    am.net_moment_material = moment_sum(am.material_dipoles);
    am.local_axes = local_frame(am.net_moment_material);
    am.origin = robot.com_override.value_or(centre_of_mass(robot.geom));
    am.local_dipoles = to_local(am.material_dipoles, am.origin, am.local_axes);
    am.design = design_matrix(mode, am.net_moment_material.norm(), d_coefficients(am.local_dipoles));
    return am;
}

}  // namespace magbot
