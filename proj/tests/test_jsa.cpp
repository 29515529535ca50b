#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cpsfwm/errors.hpp"
#include "cpsfwm/figures.hpp"
#include "cpsfwm/jsa.hpp"

using namespace cpsfwm;
using namespace cpsfwm::jsa;
using cpsfwm::source::SourceConfig;

namespace {

SourceModel model_of(const SourceConfig& c) { return SourceModel(c); }

// exp(-b^2) (erf(a1 + ib) + erf(a2 - ib)) via the straight-line integral
// erf(z) = 2z/sqrt(pi) int_0^1 exp(-z^2 s^2) ds, composite Simpson.
std::complex<double> phi_oracle(double x, double B, double Lambda) {
    const double b = B * x;
    auto term = [&](double a, double bb) {
        const std::complex<double> z(a, bb);
        const int n = 20000;
        std::complex<double> s = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            s += w * std::exp(-bb * bb - z * z * t * t);
        }
        return 2.0 / std::sqrt(M_PI) * z * s / (3.0 * n);
    };
    return term((1.0 + Lambda) / (4.0 * B), b) + term((1.0 - Lambda) / (4.0 * B), -b);
}

// Intensity-weighted variance of (nu_s + nu_i) over the grid.
double ridge_variance(const JointSpectrum& f, double cs, double ci) {
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (int r = 0; r < f.grid.n_s(); ++r) {
        for (int c = 0; c < f.grid.n_i(); ++c) {
            const double s = (f.grid.signal_axis[r] - cs) + (f.grid.idler_axis[c] - ci);
            const double p = std::norm(f.amplitude(r, c));
            w += p;
            m1 += p * s;
            m2 += p * s * s;
        }
    }
    m1 /= w;
    return m2 / w - m1 * m1;
}

}  // namespace

TEST_CASE("phase mismatch at the center") {
    const auto m = model_of(figures::jsa_row_config('a'));
    CHECK(delta_k_pulsed(m, m.omega1(), m.omega_s(), m.omega_i()) == 0.0);
    CHECK(delta_k_pulsed(m, m.omega1(), m.omega_s(), m.omega_i(), 3.5) == 3.5);
    const auto mx = model_of(figures::jsa_row_config('i'));
    CHECK(delta_k_mixed(mx, mx.omega_s(), mx.omega_i()) == 0.0);
    CHECK(delta_k_mixed(mx, mx.omega_s(), mx.omega_i(), -1.25) == -1.25);
    // kappa is the sum of all four wavenumbers.
    const double kap = kappa_pulsed(m, m.omega1(), m.omega_s(), m.omega_i());
    CHECK(kap == doctest::Approx(2.0 * (m.curve1().k(m.omega1()) + m.curve2().k(m.omega2()))).epsilon(1e-14));

    // Intermodal: the pump-centered mismatch is nonzero, the offset-centered one vanishes.
    auto few = source::make_source(figures::few_mode_fiber(), 0.82e-6, 0.01e12, 0.532e-6, 0.01e12);
    few.pump2.mode = {1, 1};
    few.signal_mode = {1, 1};
    const SourceModel mm(few);
    CHECK(mm.offset() != 0.0);
    CHECK(std::abs(delta_k_pulsed(mm, mm.omega1(), mm.omega1(), mm.omega2())) > 1.0);
    const double scale = mm.curve1().k(mm.omega1());
    CHECK(std::abs(delta_k_pulsed(mm, mm.omega1(), mm.omega_s(), mm.omega_i())) < 1e-9 * scale);
}

TEST_CASE("phi_p against the line-integral oracle") {
    CHECK(std::abs(phi_p(0.0, 1.0, 0.0) - 2.0 * std::erf(0.25)) < 1e-14);
    CHECK(std::abs(phi_p(0.0, 0.3, 0.0) - 2.0 * std::erf(1.0 / 1.2)) < 1e-14);
    for (double B : {0.2, 1.0, 3.0}) {
        for (double L : {-0.5, 0.0, 0.3}) {
            for (double x : {-4.0, -1.0, 0.0, 0.7, 2.5}) {
                const auto want = phi_oracle(x, B, L);
                CHECK(std::abs(phi_p(x, B, L) - want) < 1e-10 * std::max(1.0, std::abs(want)));
            }
        }
    }
    CHECK_THROWS(phi_p(0.0, 0.0, 0.0));
    CHECK_THROWS(phi_p(0.0, INFINITY, 0.0));
    // Finite far outside the oracle's range.
    CHECK(std::isfinite(std::abs(phi_p(1e6, 5.0, 0.2))));
    CHECK(std::abs(phi_p(1e6, 5.0, 0.2)) < 1e-6);
}

TEST_CASE("phi_p factorable limit") {
    // B -> 0: 2 exp(-B^2 x^2).
    const double B = 0.01;
    double sup = 0.0;
    for (int k = -300; k <= 300; ++k) {
        const double x = k * 1.0;
        sup = std::max(sup, std::abs(phi_p(x, B, -0.0068) - 2.0 * std::exp(-B * B * x * x)) / 2.0);
    }
    CHECK(sup <= 1e-3);
}

TEST_CASE("linear and numeric spectra agree") {
    for (char row : {'a', 'e'}) {
        const auto m = model_of(figures::jsa_row_config(row));
        const auto g = default_grid(m, 65);
        const auto lin = jsa_pulsed_linear(m, g);
        const auto num = jsa_pulsed_numeric(m, g);
        CHECK(overlap(lin, num) >= 0.99);
        CHECK(std::abs(lin.mass() - 1.0) < 1e-8);
        CHECK(std::abs(num.mass() - 1.0) < 1e-8);
        CHECK(num.normalized);
        CHECK(num.quad_residual < 1e-6);
        CHECK(num.raw_mass > 0.0);
    }
    const auto mx = model_of(figures::jsa_row_config('i'));
    const auto g = default_grid(mx, 65);
    CHECK(overlap(jsa_mixed(mx, g), jsa_mixed_linear(mx, g)) >= 0.99);
    CHECK(std::abs(jsa_mixed(mx, g).mass() - 1.0) < 1e-8);
}

TEST_CASE("raw constructors are unnormalized") {
    const auto m = model_of(figures::jsa_row_config('a'));
    const auto g = default_grid(m, 33);
    const auto raw = jsa_pulsed_numeric_raw(m, g);
    CHECK_FALSE(raw.normalized);
    CHECK(raw.mass() == doctest::Approx(raw.raw_mass).epsilon(1e-12));
}

TEST_CASE("pulsed spectrum requires two pulsed pumps") {
    const auto mx = model_of(figures::jsa_row_config('i'));
    const auto g = default_grid(mx, 17);
    CHECK_THROWS_AS(jsa_pulsed_linear(mx, g), UnsupportedConfiguration);
    CHECK_THROWS_AS(jsa_pulsed_numeric(mx, g), UnsupportedConfiguration);
    const auto m = model_of(figures::jsa_row_config('a'));
    CHECK_THROWS_AS(jsa_mixed(m, default_grid(m, 17)), UnsupportedConfiguration);
}

TEST_CASE("mixed phasematching does not depend on the signal offset") {
    const auto mx = model_of(figures::jsa_row_config('i'));
    const auto tp = source::temporal_params(mx);
    CHECK(tp.tau1s == 0.0);
    const double sigma = mx.config().pump1.sigma;
    // Divide out the pump envelope: what is left is a function of nu_i only.
    const auto g = FrequencyGrid::centered(mx.omega_s(), mx.omega_i(), 0.5 * sigma, 4.0 * M_PI / tp.t12, 5, 41);
    const auto f = jsa_mixed_linear(mx, g);
    for (int c = 0; c < g.n_i(); ++c) {
        const double nu_i = g.idler_axis[c] - mx.omega_i();
        double first = 0.0;
        for (int r = 0; r < g.n_s(); ++r) {
            const double s = g.signal_axis[r] - mx.omega_s() + nu_i;
            const double v = std::abs(f.amplitude(r, c)) / std::exp(-s * s / (sigma * sigma));
            if (r == 0) first = v;
            CHECK(std::abs(v - first) <= 1e-12 * std::max(v, first));
        }
    }
    // First zero of the sinc at nu_i = 2 pi / t12: grid node 30 of 41 over +-4 pi / t12.
    CHECK(std::abs(g.idler_axis[30] - mx.omega_i() - 2.0 * M_PI / tp.t12) < 1e-6 * (2.0 * M_PI / tp.t12));
    CHECK(std::abs(f.amplitude(2, 30)) < 1e-12 * std::abs(f.amplitude(2, 20)));
}

TEST_CASE("pump delay removes the overlap") {
    auto cfg = figures::jsa_row_config('a');
    const SourceModel m0(cfg);
    const auto g = default_grid(m0, 33);
    const double mass0 = jsa_pulsed_numeric_raw(m0, g).raw_mass;
    const auto tp = source::temporal_params(m0);
    cfg.tau = 10.0 * tp.t12;
    const double mass_far = jsa_pulsed_numeric_raw(SourceModel(cfg), g).raw_mass;
    CHECK(mass_far / mass0 < 1e-3);
}

TEST_CASE("peak sits at the grid center") {
    for (char row : {'a', 'e'}) {
        const auto m = model_of(figures::jsa_row_config(row));
        const auto f = jsa_pulsed_numeric(m, default_grid(m, 33));
        Eigen::Index r = 0, c = 0;
        f.amplitude.cwiseAbs().maxCoeff(&r, &c);
        CHECK(r == 16);
        CHECK(c == 16);
    }
}

TEST_CASE("pump exchange transposes the spectrum") {
    const auto cfg = figures::jsa_row_config('a');
    auto sw = cfg;
    std::swap(sw.pump1, sw.pump2);
    const SourceModel a(cfg), b(sw);
    const auto ga = default_grid(a, 33);
    const auto fa = jsa_pulsed_linear(a, ga);
    const auto fb = jsa_pulsed_linear(b, transposed(fa).grid);
    const auto t = transposed(fa);
    CHECK(t.grid.signal_axis == fb.grid.signal_axis);
    const double scale = fa.amplitude.cwiseAbs().maxCoeff();
    CHECK((t.amplitude.cwiseAbs() - fb.amplitude.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-10 * scale);
}

TEST_CASE("energy ridge width") {
    // |F|^2 is Gaussian in nu_s + nu_i with variance (sigma1^2 + sigma2^2) / 4.
    for (char row : {'a', 'e'}) {
        const auto m = model_of(figures::jsa_row_config(row));
        const auto& c = m.config();
        const double total = c.pump1.sigma * c.pump1.sigma + c.pump2.sigma * c.pump2.sigma;
        const auto f = jsa_pulsed_numeric(m, default_grid(m, 65, 6.0));
        const double width = std::sqrt(ridge_variance(f, m.omega_s(), m.omega_i()));
        CHECK(width == doctest::Approx(0.5 * std::sqrt(total)).epsilon(0.05));
    }
}

TEST_CASE("grid helpers") {
    CHECK_THROWS(FrequencyGrid::centered(1.0, 1.0, 1.0, 1.0, 4, 5));
    CHECK_THROWS(FrequencyGrid::centered(1.0, 1.0, 0.0, 1.0, 5, 5));
    const auto g = FrequencyGrid::centered(10.0, 20.0, 2.0, 4.0, 5, 9);
    CHECK(g.signal_axis[2] == 10.0);
    CHECK(g.idler_axis[4] == 20.0);
    CHECK(g.step_s() == doctest::Approx(1.0));
    CHECK(g.step_i() == doctest::Approx(1.0));
    const auto r = g.refined(2);
    CHECK(r.n_s() == 9);
    CHECK(r.n_i() == 17);
    CHECK(r.signal_axis.front() == g.signal_axis.front());
    CHECK(r.signal_axis.back() == g.signal_axis.back());
}

TEST_CASE("writers") {
    const auto m = model_of(figures::jsa_row_config('a'));
    const auto f = jsa_pulsed_linear(m, default_grid(m, 5));
    std::ostringstream csv;
    write_csv(csv, f);
    const auto text = csv.str();
    CHECK(text.rfind("omega_s_rad_s,omega_i_rad_s,re,im,intensity\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 26);
    CHECK(text.find("\r") == std::string::npos);

    std::ostringstream js;
    write_json(js, f);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j["method"] == "pulsed_linear");
    CHECK(j["grid"]["signal_axis_rad_s"].size() == 5);
    CHECK(j.contains("magnitude"));
}
