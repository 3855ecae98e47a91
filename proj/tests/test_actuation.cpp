#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magbot/actuation.hpp"
#include "magbot/errors.hpp"
#include "support.hpp"

using namespace magbot;

namespace {

Robot function_robot(Mode m) {
    Robot r = default_robot();
    r.mag.mode = m;
    r.mag.phi = mode_phi(m);
    r.mag.programmable_magnetized = true;
    r.mag.m_rprog = r.mat.rprog.m_magnetized;
    r.mag.m_heat = r.mat.heat.m_magnetized;
    return r;
}

Robot robot_for(Mode m) { return m == Mode::Locomotion ? default_robot() : function_robot(m); }

int rank_of(const Mat68& m) {
    Eigen::JacobiSVD<Mat68> svd(m);
    const auto& s = svd.singularValues();
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s[i] > 1e-12 * s[0]) ++r;
    return r;
}

Vec8 random_field(ts::Gen& g) {
    Vec8 v;
    v << g.vec3(20e-3), g.grad(0.5);
    return v;
}

}  // namespace

TEST_CASE("single dipole: aligned field gives no wrench") {
    DipoleList d = {{Vec3::Zero(), Vec3(0, 0, 1e-5), 0.0, "m"}};
    FieldState fs;
    fs.frame = Frame::Local;
    fs.b = Vec3(0, 0, 10e-3);
    const Wrench w = wrench(d, fs);
    CHECK(w.torque.norm() == 0.0);
    CHECK(w.force.norm() == 0.0);
}

TEST_CASE("single dipole: hand-evaluated gradient force") {
    const double m = 2e-5, g = 0.8;
    DipoleList d = {{Vec3::Zero(), Vec3(0, 0, m), 0.0, "m"}};
    FieldState fs;
    fs.frame = Frame::Local;
    fs.grad << 0, 0, g, -g / 2, 0;
    const Wrench w = wrench(d, fs);
    CHECK((w.force - Vec3(0, 0, m * g)).norm() < 1e-20);
    CHECK(w.torque.norm() == 0.0);
    CHECK_THROWS_AS(wrench(d, FieldState{}), std::invalid_argument);
}

TEST_CASE("wrench_matrix agrees with direct wrench evaluation") {
    ts::Gen gen(51);
    for (Mode mode : {Mode::Locomotion, Mode::DrugDispensing, Mode::Cutting, Mode::GrippingStorage}) {
        const ActuationModel am = build_actuation(robot_for(mode), 15e-3, Shape::InvertedU);
        const Mat68 w = wrench_matrix(am.local_dipoles);
        for (int k = 0; k < 100; ++k) {
            const Vec8 x = random_field(gen);
            const Vec6 direct = wrench(am.local_dipoles, FieldState::from_vector(x, Frame::Local)).as_vector();
            CHECK((w * x - direct).norm() <= 1e-9 * direct.norm());
        }
    }
}

TEST_CASE("locomotion design matrix equals the exact dipole-sum wrench") {
    ts::Gen gen(52);
    for (double b : {8e-3, 15e-3, 22e-3}) {
        const ActuationModel am = build_actuation(default_robot(), b, Shape::InvertedU);
        const Mat68 exact = wrench_matrix(am.local_dipoles);
        for (int k = 0; k < 50; ++k) {
            const Vec8 x = random_field(gen);
            const Vec6 a = am.design.m * x, e = exact * x;
            CHECK((a - e).norm() <= 1e-9 * e.norm());
        }
    }
}

TEST_CASE("d coefficients: origin profile is zero, locomotion profile is symmetric") {
    DipoleList at_origin = {{Vec3::Zero(), Vec3(1, 2, 3), 0.0, "a"}, {Vec3::Zero(), Vec3(-1, 0, 5), 0.0, "b"}};
    const DCoefficients z = d_coefficients(at_origin);
    for (double v : {z.d2, z.d5, z.d6, z.d8, z.d9, z.d12, z.d15}) CHECK(v == 0.0);

    const ActuationModel am = build_actuation(default_robot(), 15e-3, Shape::InvertedU);
    const DCoefficients d = am.design.d;
    const double scale = std::abs(d.d15);
    CHECK(scale > 0.0);
    for (double v : {d.d5, d.d8, d.d9, d.d12}) CHECK(std::abs(v) <= 1e-9 * scale);
}

TEST_CASE("design matrix sparsity patterns") {
    DCoefficients d;
    d.d2 = d.d6 = d.d15 = 1;
    d.d5 = d.d8 = d.d9 = d.d12 = 1;
    const DesignMatrix loco = design_matrix(Mode::Locomotion, 1.0, d);
    int nz = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 8; ++j) nz += loco.m(i, j) != 0.0;
    CHECK(nz == 8);
    CHECK(design_matrix(Mode::DrugDispensing, 1.0, d).m == loco.m);
    const DesignMatrix cut = design_matrix(Mode::Cutting, 1.0, d);
    CHECK(cut.m(0, 7) == 1);
    CHECK(cut.m(1, 5) == 1);
    CHECK(cut.m(1, 6) == 1);
    CHECK(cut.m(2, 4) == 1);
    CHECK((cut.m - loco.m).cwiseAbs().sum() == 4);
    CHECK(design_matrix(Mode::GrippingStorage, 1.0, d).m == cut.m);
    CHECK_THROWS_AS(design_matrix(Mode::Locomotion, -1.0, d), std::invalid_argument);
}

TEST_CASE("design and control matrices have rank six in every mode") {
    for (Mode mode : {Mode::Locomotion, Mode::DrugDispensing, Mode::Cutting, Mode::GrippingStorage}) {
        const ActuationModel am = build_actuation(robot_for(mode), 15e-3, Shape::InvertedU);
        CHECK(am.design.d.d15 != 0.0);
        CHECK(rank_of(am.design.m) == 6);
        for (double th : {0.3, 1.0, 2.0}) CHECK(rank_of(control_matrix(am.design, th)) == 6);
    }
}

TEST_CASE("control matrix: identity at zero and 2 pi periodic") {
    const ActuationModel am = build_actuation(default_robot(), 15e-3, Shape::InvertedU);
    CHECK((control_matrix(am.design, 0.0) - am.design.m).cwiseAbs().maxCoeff() == 0.0);
    for (double th : {0.2, 1.7, -2.5})
        CHECK((control_matrix(am.design, th + 2 * kPi) - control_matrix(am.design, th)).cwiseAbs().maxCoeff() <
              1e-12 * am.design.m.cwiseAbs().maxCoeff());
}

TEST_CASE("null vectors annihilate the control matrix at every degree") {
    for (Mode mode : {Mode::Locomotion, Mode::DrugDispensing, Mode::Cutting, Mode::GrippingStorage}) {
        const ActuationModel am = build_actuation(robot_for(mode), 15e-3, Shape::InvertedU);
        const double scale = am.design.m.cwiseAbs().maxCoeff();
        for (int deg = 0; deg < 360; ++deg) {
            const double th = deg2rad(deg);
            const Mat68 c = control_matrix(am.design, th);
            CHECK((c * null_vector_1()).cwiseAbs().maxCoeff() < 1e-9 * scale);
            CHECK((c * null_vector_2(am.design, th)).cwiseAbs().maxCoeff() < 1e-9 * scale);
        }
        const Vec8 n45 = null_vector_2(am.design, kPi / 4);
        CHECK(std::abs(n45[7]) == ts::approx(1.0));
        CHECK(n45.allFinite());
    }
}

TEST_CASE("solve_fields: homogeneous and pure-k1 solutions") {
    const ActuationModel am = build_actuation(default_robot(), 15e-3, Shape::InvertedU);
    const FieldState zero = solve_fields(am.design, 0.7, Vec3::Zero(), 0, 0);
    CHECK(zero.frame == Frame::Intermediate);
    CHECK(zero.as_vector().norm() < 1e-18);
    const FieldState b = solve_fields(am.design, 0.7, Vec3::Zero(), 15e-3, 0);
    CHECK((b.b - Vec3(0, 0, 15e-3)).norm() < 1e-15);
    CHECK(b.grad.norm() < 1e-15);
}

TEST_CASE("solve_fields meets the requested wrench for random inputs") {
    ts::Gen gen(53);
    for (Mode mode : {Mode::Locomotion, Mode::Cutting}) {
        const ActuationModel am = build_actuation(robot_for(mode), 15e-3, Shape::InvertedU);
        for (int k = 0; k < 100; ++k) {
            const double th = gen.uniform(0, 2 * kPi);
            const Vec3 f = gen.vec3(1e-6);
            const FieldState fs = solve_fields(am.design, th, f, gen.uniform(0, 20e-3), gen.uniform(-1, 1));
            Vec6 want;
            want << Vec3::Zero(), f;
            CHECK((control_matrix(am.design, th) * fs.as_vector() - want).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("solve_fields rejects a rank-deficient design") {
    DesignMatrix d = design_matrix(Mode::Locomotion, 1e-5, DCoefficients{});
    CHECK_THROWS_AS(solve_fields(d, 0.3, Vec3::Zero(), 0, 0), SolverFailure);
    CHECK_THROWS_AS(solve_fields(DesignMatrix{}, 0.3, Vec3::Zero(), 0, 0), SolverFailure);
}

TEST_CASE("levitation gradient with the aligned moment bound") {
    DCoefficients d;
    d.d2 = d.d6 = d.d15 = 1e-9;
    const DesignMatrix dm = design_matrix(Mode::Locomotion, 3.71e-5, d);
    const double weight = default_robot().mass_kg * 9.81;
    const FieldState fs = solve_fields(dm, 0.0, Vec3(0, 0, weight), 0, 0);
    const Mat3 g = gradient_matrix(fs.grad);
    CHECK(g(2, 2) == ts::approx(4.39).epsilon(0.02));
}

TEST_CASE("restoring torque opposes the angular error") {
    const ActuationModel am = build_actuation(default_robot(), 15e-3, Shape::InvertedU);
    for (double des : {0.0, 0.6, 2.0}) {
        const FieldState fs = solve_fields(am.design, des, Vec3::Zero(), 15e-3, 0.4);
        CHECK(std::abs(restoring_torque(am.design, des, fs).torque.z()) < 1e-9);
        for (int dd = -29; dd <= 29; dd += 2) {
            if (dd == 0) continue;
            const double tz = restoring_torque(am.design, des + deg2rad(dd), fs).torque.z();
            CHECK(tz * dd < 0);
        }
    }
    double prev = 0;
    for (double k2 : {0.1, 0.2, 0.4, 0.8}) {
        const FieldState fs = solve_fields(am.design, 0.0, Vec3::Zero(), 15e-3, k2);
        const double tz = std::abs(restoring_torque(am.design, deg2rad(10), fs).torque.z());
        CHECK(tz > prev);
        prev = tz;
    }
}

TEST_CASE("intermediate-frame wrench matches the global evaluation") {
    ts::Gen gen(54);
    const ActuationModel am = build_actuation(default_robot(), 15e-3, Shape::InvertedU);
    for (int k = 0; k < 50; ++k) {
        const double th = gen.uniform(0, 2 * kPi);
        const double a = gen.uniform(-1.5, 1.5), b = gen.uniform(-1.5, 1.5);
        const FieldState fi = solve_fields(am.design, th, gen.vec3(1e-6), 15e-3, 0.4);
        // robot orientation in the world: Rx(a) Ry(b) Rz(theta) with local frame attached
        const Mat3 body = ts::Rx(a) * ts::Ry(b) * ts::Rz(th);
        const FieldState fg = map_to_global(a, b, fi);
        const FieldState fl = rotate_field(body.transpose(), fg, Frame::Local);
        const Wrench wl = wrench(am.local_dipoles, fl);
        const Vec3 tg = body * wl.torque, fgv = body * wl.force;
        const Wrench wi = restoring_torque(am.design, th, fi);
        const Mat3 ab = ts::Rx(a) * ts::Ry(b);
        const Vec3 ti = ab * wi.torque, fiv = ab * wi.force;
        // torque nearly vanishes at equilibrium; floor at |m| |B|
        const double tscale = std::max(tg.norm(), am.design.moment_magnitude * 15e-3);
        CHECK((tg - ti).norm() <= 1e-8 * tscale);
        CHECK((fgv - fiv).norm() <= 1e-8 * std::max(fgv.norm(), 1e-6));
    }
}

TEST_CASE("build_actuation: shapes and function modes") {
    const ActuationModel inv = build_actuation(default_robot(), 15e-3, Shape::InvertedU);
    const ActuationModel up = build_actuation(default_robot(), 15e-3, Shape::UprightU);
    CHECK(inv.tentacle.has_value());
    CHECK(inv.net_moment_material.z() * up.net_moment_material.z() < 0);
    const ActuationModel fn = build_actuation(function_robot(Mode::Cutting), 15e-3, Shape::InvertedU);
    CHECK_FALSE(fn.tentacle.has_value());
    CHECK(fn.design.moment_magnitude > 0);
    CHECK_THROWS_AS(build_actuation(default_robot(), -1e-3, Shape::InvertedU), std::invalid_argument);
}
