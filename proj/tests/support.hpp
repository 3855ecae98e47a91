#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <doctest.h>

#include "magbot/fieldspace.hpp"

namespace ts {

// Relative comparison; doctest's default absolute floor of 1.0 hides SI-scale errors.
inline doctest::Approx approx(double v) { return doctest::Approx(v).scale(0.0); }

// Deterministic generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : g_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(g_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(g_); }

    magbot::Vec3 vec3(double scale) { return magbot::Vec3(normal(), normal(), normal()) * scale; }

    magbot::Mat3 rotation() {
        Eigen::Quaterniond q(normal(), normal(), normal(), normal());
        q.normalize();
        return q.toRotationMatrix();
    }

    magbot::Vec5 grad(double scale) {
        magbot::Vec5 g;
        for (int i = 0; i < 5; ++i) g[i] = normal() * scale;
        return g;
    }

    magbot::FieldState field(magbot::Frame f, double b_scale = 20e-3, double g_scale = 0.3) {
        magbot::FieldState fs;
        fs.b = vec3(b_scale);
        fs.grad = grad(g_scale);
        fs.frame = f;
        return fs;
    }

private:
    std::mt19937_64 g_;
};

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Rotations written out by hand, independent of the library.
inline magbot::Mat3 Rx(double a) {
    magbot::Mat3 m;
    m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return m;
}
inline magbot::Mat3 Ry(double a) {
    magbot::Mat3 m;
    m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return m;
}
inline magbot::Mat3 Rz(double a) {
    magbot::Mat3 m;
    m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return m;
}

// Full gradient tensor from the 5-vector, written independently: G(i,j) = dB_i/dx_j.
inline magbot::Mat3 full_gradient(const magbot::Vec5& g) {
    const double gzx = g[0], gzy = g[1], gzz = g[2], gyy = g[3], gxy = g[4];
    magbot::Mat3 m;
    m << -gzz - gyy, gxy, gzx,
         gxy, gyy, gzy,
         gzx, gzy, gzz;
    return m;
}

inline magbot::Vec5 five(const magbot::Mat3& m) {
    magbot::Vec5 g;
    g << m(2, 0), m(2, 1), m(2, 2), m(1, 1), m(0, 1);
    return g;
}

}  // namespace ts
