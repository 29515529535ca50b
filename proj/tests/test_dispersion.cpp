#include <doctest.h>

#include <cmath>
#include <random>

#include "cpsfwm/constants.hpp"
#include "cpsfwm/dispersion.hpp"
#include "cpsfwm/errors.hpp"

using namespace cpsfwm;
using namespace cpsfwm::constants;
using namespace cpsfwm::dispersion;

namespace {

FiberSpec small_core() { return {1.5e-6, 0.13, 0.01, {}}; }
FiberSpec few_mode() { return {2e-6, 0.3, 0.01, {}}; }

// Malitson fused silica, evaluated independently of the library.
double silica(double lambda_um) {
    const double l2 = lambda_um * lambda_um;
    return std::sqrt(1.0 + 0.6961663 * l2 / (l2 - 0.0684043 * 0.0684043) +
                     0.4079426 * l2 / (l2 - 0.1162414 * 0.1162414) + 0.8974794 * l2 / (l2 - 9.896161 * 9.896161));
}

double omega_of(double lambda) { return 2.0 * M_PI * speed_of_light / lambda; }

// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

// Integral over the plane of g(x, y) with g built from the profile, polar
// coordinates, core and cladding integrated separately.
template <class G>
double plane_integral(G&& g, double a) {
    const int nphi = 64;
    auto ring = [&](double r) {
        if (r == 0.0) return 0.0;
        double s = 0.0;
        for (int j = 0; j < nphi; ++j) {
            const double phi = 2.0 * M_PI * (j + 0.25) / nphi;
            s += g(r * std::cos(phi), r * std::sin(phi));
        }
        return s * 2.0 * M_PI / nphi * r;
    };
    return simpson(ring, 0.0, a, 400) + simpson(ring, a, 30.0 * a, 6000);
}

}  // namespace

TEST_CASE("sellmeier index") {
    CHECK(sellmeier_index(0.5876e-6) == doctest::Approx(1.45846).epsilon(1e-4 / 1.45846));
    for (double l = 0.25; l < 3.6; l += 0.05) CHECK(sellmeier_index(l * 1e-6) == doctest::Approx(silica(l)).epsilon(1e-14));
    CHECK(sellmeier_index(0.532e-6) > sellmeier_index(0.820e-6));
    CHECK_THROWS_AS(sellmeier_index(0.21e-6 - 1e-12), PhysicsError);
    CHECK_THROWS_AS(sellmeier_index(3.71e-6), PhysicsError);
}

TEST_CASE("core index keeps the numerical aperture") {
    const auto f = few_mode();
    for (double l : {0.5e-6, 0.8e-6, 1.3e-6}) {
        const double nc = core_index(f, l), nl = cladding_index(f, l);
        CHECK(std::sqrt(nc * nc - nl * nl) == doctest::Approx(0.3).epsilon(1e-12));
    }
}

TEST_CASE("v number") {
    CHECK(v_number(few_mode(), 0.532e-6) == doctest::Approx(2 * M_PI * 2 * 0.3 / 0.532).epsilon(1e-12));
    CHECK(v_number(few_mode(), 0.532e-6) == doctest::Approx(7.086).epsilon(1e-3));
    CHECK(v_number(small_core(), 0.820e-6) == doctest::Approx(1.494).epsilon(1e-3));
    CHECK(v_number(small_core(), 3.0e-6) < v_number(small_core(), 1.0e-6));
}

TEST_CASE("mode solver") {
    SUBCASE("single-mode fiber") {
        const auto modes = solve_lp_modes(small_core(), 0.820e-6);
        REQUIRE(modes.size() == 1);
        CHECK(modes[0].mode == ModeId::lp01());
    }
    SUBCASE("few-mode fiber at 820 nm") {
        const auto modes = solve_lp_modes(few_mode(), 0.820e-6);
        REQUIRE(modes.size() == 4);
        CHECK(modes[0].mode == ModeId{0, 1});
        CHECK(modes[1].mode == ModeId{1, 1});
        CHECK(modes[2].mode == ModeId{2, 1});
        CHECK(modes[3].mode == ModeId{0, 2});
        for (std::size_t k = 1; k < modes.size(); ++k) CHECK(modes[k].b < modes[k - 1].b);
        const double v = v_number(few_mode(), 0.820e-6);
        for (const auto& g : modes) {
            CHECK(g.b > 0.0);
            CHECK(g.b < 1.0);
            CHECK(std::abs(characteristic_residual(g.mode.l, v, g.b)) < 1e-10);
            CHECK(normalized_b(few_mode(), g.mode, 0.820e-6) == doctest::Approx(g.b).epsilon(1e-10));
        }
    }
    SUBCASE("cutoffs") {
        CHECK(cutoff_v(ModeId::lp01()) == 0.0);
        CHECK(cutoff_v({1, 1}) == doctest::Approx(2.404825557695773).epsilon(1e-12));
        CHECK(std::isinf(cutoff_wavelength(small_core(), ModeId::lp01())));
        const double lc = cutoff_wavelength(small_core(), {1, 1});
        CHECK(v_number(small_core(), lc) == doctest::Approx(2.404825557695773).epsilon(1e-8));
        CHECK_NOTHROW(normalized_b(small_core(), {1, 1}, 0.98 * lc));
        CHECK_THROWS_AS(normalized_b(small_core(), {1, 1}, 1.02 * lc), ModeNotGuided);
        try {
            normalized_b(small_core(), {2, 1}, 0.8e-6);
            FAIL("expected ModeNotGuided");
        } catch (const ModeNotGuided& e) {
            CHECK(std::string(e.what()).find("cutoff") != std::string::npos);
        }
    }
}

TEST_CASE("propagation constant bounds and monotonicity") {
    for (const auto& [fiber, mode] : {std::pair{small_core(), ModeId::lp01()}, std::pair{few_mode(), ModeId{1, 1}},
                                      std::pair{few_mode(), ModeId{0, 2}}}) {
        double prev = 0.0;
        for (double l = 0.9e-6; l >= 0.45e-6; l -= 0.01e-6) {
            const double w = omega_of(l);
            const double k = propagation_constant(fiber, mode, w);
            CHECK(k > cladding_index(fiber, l) * w / speed_of_light);
            CHECK(k <= core_index(fiber, l) * w / speed_of_light);
            CHECK(k > prev);
            prev = k;
        }
    }
    CHECK_THROWS_AS(propagation_constant(small_core(), {2, 1}, omega_of(0.82e-6)), ModeNotGuided);
}

TEST_CASE("group slowness") {
    const auto f = small_core();
    auto fd = [&](double w, double h) {
        return (propagation_constant(f, ModeId::lp01(), w + h) - propagation_constant(f, ModeId::lp01(), w - h)) /
               (2.0 * h);
    };
    const double w1 = omega_of(0.82e-6), w2 = omega_of(0.532e-6);
    const double k1 = group_slowness(f, ModeId::lp01(), w1);
    const double k2 = group_slowness(f, ModeId::lp01(), w2);
    // Two independent step sizes bracket the value.
    CHECK(k1 == doctest::Approx(fd(w1, 1e-5 * w1)).epsilon(1e-6));
    CHECK(k1 == doctest::Approx(fd(w1, 3e-5 * w1)).epsilon(1e-6));
    CHECK(k2 == doctest::Approx(fd(w2, 1e-5 * w2)).epsilon(1e-6));
    CHECK(k1 == doctest::Approx(4.9e-9).epsilon(0.02));
    CHECK(k1 * speed_of_light > 1.46);
    CHECK(k1 * speed_of_light < 1.48);
    CHECK(k1 + k2 >= 9.6e-9);
    CHECK(k1 + k2 <= 10.1e-9);
    for (const auto& fiber : {small_core(), few_mode()})
        for (double l = 0.5e-6; l <= 1.0e-6; l += 0.05e-6)
            CHECK(group_slowness(fiber, ModeId::lp01(), omega_of(l)) > cladding_index(fiber, l) / speed_of_light);
    const auto s = sample(f, ModeId::lp01(), w1);
    CHECK(s.k == doctest::Approx(s.n_eff * w1 / speed_of_light).epsilon(1e-14));
    CHECK(s.k_prime == k1);
}

TEST_CASE("mode profiles are normalized") {
    for (const auto& [fiber, mode, lambda] :
         {std::tuple{small_core(), ModeId::lp01(), 0.82e-6}, std::tuple{few_mode(), ModeId{1, 1}, 0.82e-6},
          std::tuple{few_mode(), ModeId{2, 1}, 0.532e-6}, std::tuple{few_mode(), ModeId{0, 2}, 0.82e-6}}) {
        const ModeProfile p(fiber, mode, lambda);
        const double norm = plane_integral([&](double x, double y) { return p(x, y) * p(x, y); }, fiber.core_radius);
        INFO(mode.name());
        CHECK(std::abs(norm - 1.0) <= 1e-8);
        // Field and slope continuity at the core boundary.
        // Linear extrapolation from inside the core lands on the cladding value.
        const double a = fiber.core_radius, h = 1e-5 * a;
        const double inner = p.radial(a - h) + 2.0 * (p.radial(a - h) - p.radial(a - 2.0 * h));
        CHECK(inner == doctest::Approx(p.radial(a + h)).epsilon(1e-7));
    }
}

TEST_CASE("overlap integrals") {
    const auto f = few_mode();
    const ModeId m01 = ModeId::lp01(), m11{1, 1}, m21{2, 1};
    const double l = 0.82e-6;
    const double two = overlap_two(f, m01, m01, l, l);
    const double self = overlap_self(f, m01, l);
    const double four = overlap_four(f, {m01, m01, m01, m01}, {l, l, l, l});
    CHECK(two == doctest::Approx(self).epsilon(1e-12));
    CHECK(four == doctest::Approx(self).epsilon(1e-10));
    CHECK(overlap_two(f, m01, m11, 0.82e-6, 0.532e-6) == overlap_two(f, m11, m01, 0.532e-6, 0.82e-6));
    const double mixed = overlap_four(f, {m01, m11, m11, m01}, {0.82e-6, 0.532e-6, 0.82e-6, 0.532e-6});
    CHECK(mixed > 0.0);
    CHECK(mixed < overlap_four(f, {m01, m01, m01, m01}, {0.82e-6, 0.532e-6, 0.82e-6, 0.532e-6}));
    // One LP11 against three LP01 vanishes by symmetry.
    CHECK(std::abs(overlap_four(f, {m11, m01, m01, m01}, {l, l, l, l})) < 1e-6 * self);
    // Independent plane quadrature of |f|^4 and |f1|^2 |f2|^2.
    const ModeProfile p01(f, m01, l), p21(f, m21, 0.532e-6);
    CHECK(self == doctest::Approx(plane_integral([&](double x, double y) { return std::pow(p01(x, y), 4); },
                                                 f.core_radius))
                      .epsilon(1e-7));
    CHECK(overlap_two(f, m01, m21, l, 0.532e-6) ==
          doctest::Approx(plane_integral([&](double x, double y) { return std::pow(p01(x, y) * p21(x, y), 2); },
                                         f.core_radius))
              .epsilon(1e-7));
}

TEST_CASE("mode curve agrees with direct evaluation") {
    const ModeCurve c(few_mode(), ModeId{1, 1});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(omega_of(1.0e-6), omega_of(0.45e-6));
    for (int k = 0; k < 60; ++k) {
        const double w = u(rng);
        CHECK(c.k(w) == doctest::Approx(propagation_constant(few_mode(), {1, 1}, w)).epsilon(1e-12));
        CHECK(c.k_prime(w) == doctest::Approx(group_slowness(few_mode(), {1, 1}, w)).epsilon(1e-7));
    }
}

TEST_CASE("mode labels and fiber validation") {
    CHECK(parse_mode("LP01") == ModeId{0, 1});
    CHECK(parse_mode("lp21") == ModeId{2, 1});
    CHECK(ModeId{0, 2}.name() == "LP02");
    CHECK_THROWS_AS(parse_mode("LP1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mode("HE11"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mode("LP10"), std::invalid_argument);
    FiberSpec bad = small_core();
    bad.numerical_aperture = 1.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_core();
    bad.core_radius = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_core();
    bad.length = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
