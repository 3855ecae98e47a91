#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "magbot/beam_mech.hpp"
#include "magbot/scaling.hpp"
#include "support.hpp"

using namespace magbot;

namespace {

template <class T>
bool same_bits(const T& a, const T& b) {
    return std::memcmp(&a, &b, sizeof(T)) == 0;
}

void check_geometry_bits(const Geometry& a, const Geometry& b) {
    for (auto f : {&Geometry::z_tent, &Geometry::t_tent, &Geometry::b_tent, &Geometry::l_tent, &Geometry::z_six,
                   &Geometry::y_six1, &Geometry::y_six2, &Geometry::v_six, &Geometry::z_main, &Geometry::v_inner,
                   &Geometry::z_rprog, &Geometry::v_rprog, &Geometry::z_heat, &Geometry::v_heat})
        CHECK(same_bits(a.*f, b.*f));
    for (int i = 0; i < 3; ++i) {
        CHECK(same_bits(a.x_inner[i], b.x_inner[i]));
        CHECK(same_bits(a.y_inner[i], b.y_inner[i]));
    }
}

double inner_tip(const Robot& r, double b) { return solve_inner_beam(b, InnerBeamParams::from_robot(r)); }
double tent_tip(const Robot& r, double b) { return solve_tentacle(b, TentacleParams::from_robot(r)).tip_angle(); }

}  // namespace

TEST_CASE("wrench scale") {
    CHECK(wrench_scale(ScalePlan{}) == ts::approx(0.568).epsilon(0.001));
    CHECK(wrench_scale(ScalePlan::identity()) == 1.0);
    ScalePlan half{0.5, 0.5, std::nullopt};
    CHECK(wrench_scale(half) == 0.125);
    CHECK_THROWS_AS(wrench_scale(ScalePlan{0.0, 1.0, std::nullopt}), std::invalid_argument);
    CHECK_THROWS_AS(wrench_scale(ScalePlan{1.0, -1.0, std::nullopt}), std::invalid_argument);
}

TEST_CASE("beam thickness rescaling") {
    const ScalePlan p;
    CHECK(inner_thickness(p, 60e-6) == ts::approx(49.7e-6).epsilon(0.01));
    CHECK(inner_thickness(p, 20e-6) == ts::approx(16.6e-6).epsilon(0.01));
    CHECK(tentacle_thickness(p, 150e-6) == ts::approx(85.2e-6).epsilon(0.01));
    CHECK(inner_thickness(ScalePlan::identity(), 33e-6) == 33e-6);
    CHECK(tentacle_thickness(ScalePlan::identity(), 150e-6) == 150e-6);
    CHECK_THROWS_AS(inner_thickness(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tentacle_thickness(p, -1e-6), std::invalid_argument);
}

TEST_CASE("inner thickness keeps the small-deflection tip angle") {
    // tip angle ~ 12 T l / (E b h^3); torque ~ lambda^3, l ~ lambda, b ~ lambda
    ts::Gen gen(81);
    for (int k = 0; k < 50; ++k) {
        const double lam = gen.uniform(0.2, 1.0);
        const ScalePlan p{lam, 0.5, std::nullopt};
        const double h = gen.uniform(10e-6, 100e-6);
        const double t = 1e-9, l = 0.5e-3, b = 0.3e-3, e = 5.7e5;
        const double g_old = 12 * t * l / (e * b * h * h * h);
        const double hn = inner_thickness(p, h);
        const double g_new = 12 * (t * lam * lam * lam) * (l * lam) / (e * (b * lam) * hn * hn * hn);
        CHECK(g_new == ts::approx(g_old).epsilon(1e-12));
    }
}

TEST_CASE("tentacle thickness keeps h/l") {
    ts::Gen gen(82);
    for (int k = 0; k < 50; ++k) {
        const ScalePlan p{0.8, gen.uniform(0.2, 1.0), std::nullopt};
        const double h = gen.uniform(50e-6, 300e-6), l = gen.uniform(1e-3, 6e-3);
        const double hn = tentacle_thickness(p, h), ln = l * p.lambda_tent;
        CHECK((hn * hn) / (ln * ln) == ts::approx((h * h) / (l * l)).epsilon(1e-12));
    }
}

TEST_CASE("capacities of the default plan") {
    const Capacities c = capacities(ScalePlan{});
    CHECK(c.drug_volume == ts::approx(0.131e-9).epsilon(0.01));
    CHECK(c.sample_volume == ts::approx(0.0363e-9).epsilon(0.01));
    CHECK(c.cutter_area == ts::approx(8.34e-11).epsilon(0.01));
    CHECK(c.heating_ratio == ts::approx(0.828).epsilon(0.001));
    CHECK(c.drug_ok);
    CHECK(c.sample_ok);
    CHECK(c.cutter_ok);
    CHECK(c.cutter_area >= 7.85e-11);
    const Capacities tiny = capacities(ScalePlan{0.5, 0.5, std::nullopt});
    CHECK_FALSE(tiny.drug_ok);
    CHECK_FALSE(tiny.sample_ok);
    CHECK_FALSE(tiny.cutter_ok);
}

TEST_CASE("pressure parity") {
    CHECK(pressure_parity(ScalePlan{}) == 1.0);
    ts::Gen gen(83);
    for (int k = 0; k < 20; ++k) {
        const ScalePlan p{gen.uniform(0.1, 1), gen.uniform(0.1, 1), std::nullopt};
        CHECK(pressure_parity(p) == ts::approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("identity plan leaves the robot unchanged bit for bit") {
    const Robot r = default_robot();
    const Robot s = scale_robot(r, ScalePlan::identity());
    check_geometry_bits(s.geom, r.geom);
    CHECK(same_bits(s.inner_beam.second_moment, r.inner_beam.second_moment));
    CHECK(same_bits(s.inner_beam.length, r.inner_beam.length));
    CHECK(same_bits(s.inner_beam.youngs_modulus, r.inner_beam.youngs_modulus));
    CHECK(same_bits(s.mass_kg, r.mass_kg));
    CHECK(s.mag == r.mag);
    const Capacities c = capacities(ScalePlan::identity());
    CHECK(c.drug_volume == CapacityData{}.drug_volume);
    CHECK(c.cutter_area == CapacityData{}.cutter_area);
}

TEST_CASE("composition equals the product plan") {
    ts::Gen gen(84);
    const Robot r = default_robot();
    for (int k = 0; k < 30; ++k) {
        ScalePlan a{gen.uniform(0.3, 1), gen.uniform(0.3, 1), std::nullopt};
        ScalePlan b{gen.uniform(0.3, 1), gen.uniform(0.3, 1), std::nullopt};
        if (k % 3 == 0) b.lambda_width = gen.uniform(0.3, 1);
        const ScalePlan ab = compose(a, b);
        CHECK(wrench_scale(ab) == ts::approx(wrench_scale(a) * wrench_scale(b)).epsilon(1e-14));
        CHECK(inner_thickness(ab, 40e-6) == ts::approx(inner_thickness(b, inner_thickness(a, 40e-6))).epsilon(1e-14));
        CHECK(tentacle_thickness(ab, 1e-4) ==
              ts::approx(tentacle_thickness(b, tentacle_thickness(a, 1e-4))).epsilon(1e-14));
        const Capacities c1 = capacities(ab);
        CapacityData mid;
        const Capacities ca = capacities(a);
        mid.drug_volume = ca.drug_volume;
        mid.sample_volume = ca.sample_volume;
        mid.cutter_area = ca.cutter_area;
        const Capacities c2 = capacities(b, mid);
        CHECK(c1.drug_volume == ts::approx(c2.drug_volume).epsilon(1e-14));
        CHECK(c1.sample_volume == ts::approx(c2.sample_volume).epsilon(1e-14));
        CHECK(c1.cutter_area == ts::approx(c2.cutter_area).epsilon(1e-14));
        CHECK(c1.heating_ratio == ts::approx(capacities(a).heating_ratio * capacities(b).heating_ratio).epsilon(1e-14));
        const Robot s1 = scale_robot(r, ab);
        const Robot s2 = scale_robot(scale_robot(r, a), b);
        CHECK(s1.geom.t_tent == ts::approx(s2.geom.t_tent).epsilon(1e-14));
        CHECK(s1.geom.l_tent == ts::approx(s2.geom.l_tent).epsilon(1e-14));
        CHECK(s1.geom.v_six == ts::approx(s2.geom.v_six).epsilon(1e-14));
        CHECK(s1.geom.x_inner[0] == ts::approx(s2.geom.x_inner[0]).epsilon(1e-14));
        CHECK(s1.inner_beam.second_moment == ts::approx(s2.inner_beam.second_moment).epsilon(1e-14));
        CHECK(s1.mass_kg == ts::approx(s2.mass_kg).epsilon(1e-14));
    }
}

TEST_CASE("scaled robot keeps both beam deflections") {
    const Robot r = default_robot();
    const Robot s = scale_robot(r, ScalePlan{});
    for (double b : {2e-3, 8e-3, 15e-3, 22e-3}) CHECK(tent_tip(s, b) == ts::approx(tent_tip(r, b)).epsilon(0.005));
    for (double b : {0.5e-3, 1.0e-3, 1.5e-3}) CHECK(inner_tip(s, b) == ts::approx(inner_tip(r, b)).epsilon(0.005));
    const double bc = inner_contact_field(InnerBeamParams::from_robot(r), r.inner_beam.gamma_contact);
    const double bs = inner_contact_field(InnerBeamParams::from_robot(s), s.inner_beam.gamma_contact);
    CHECK(bs == ts::approx(bc).epsilon(0.005));
    // breaking the width assumption changes the inner deflection
    ScalePlan wide;
    wide.lambda_width = 1.0;
    CHECK(std::abs(inner_tip(scale_robot(r, wide), 1e-3) / inner_tip(r, 1e-3) - 1) > 0.05);
}

TEST_CASE("scale table") {
    const std::string t = format_scale_table(ScalePlan{});
    CHECK(t.rfind("quantity,value,unit,status\n", 0) == 0);
    CHECK(t.find("drug_volume,") != std::string::npos);
    CHECK(t.find("FAIL") == std::string::npos);
    CHECK(format_scale_table(ScalePlan{0.5, 0.5, std::nullopt}).find("FAIL") != std::string::npos);
}
