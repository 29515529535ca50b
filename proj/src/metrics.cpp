#include "cpsfwm/metrics.hpp"

#include <fmt/format.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cpsfwm/constants.hpp"
#include "cpsfwm/errors.hpp"

namespace cpsfwm::metrics {

using constants::pi;
using constants::sinc_gaussian_gamma;
using constants::speed_of_light;

SchmidtResult purity(const JointSpectrum& f) {
    // The cell size only rescales the singular values; the grid may be empty.
    if (!(f.amplitude.squaredNorm() > 0.0)) throw PhysicsError("purity: all-zero joint spectrum");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(f.amplitude);
    const Eigen::VectorXd s = svd.singularValues();
    const double total = s.squaredNorm();
    SchmidtResult r;
    r.singular_values.resize(static_cast<std::size_t>(s.size()));
    double p = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const double lambda = s[k] * s[k] / total;
        r.singular_values[static_cast<std::size_t>(k)] = std::sqrt(lambda);
        p += lambda * lambda;
    }
    r.purity = p;
    r.schmidt_number = 1.0 / p;
    return r;
}

double h_factor(const SourceModel& model, double omega_s, double omega_i) {
    auto one = [](const dispersion::ModeCurve& c, double w) {
        const double n = c.n_eff(w);
        return w * c.k_prime(w) / (n * n);
    };
    return one(model.curve_s(), omega_s) * one(model.curve_i(), omega_i);
}

namespace {

// Sum of h |F|^2 dws dwi on the full grid and on every other node.
struct GridSums {
    double full = 0.0;
    double half = 0.0;
};

GridSums weighted_mass(const SourceModel& model, const JointSpectrum& f) {
    const auto& g = f.grid;
    std::vector<double> hs(static_cast<std::size_t>(g.n_s()));
    std::vector<double> hi(static_cast<std::size_t>(g.n_i()));
    auto one = [](const dispersion::ModeCurve& c, double w) {
        const double n = c.n_eff(w);
        return w * c.k_prime(w) / (n * n);
    };
    for (int r = 0; r < g.n_s(); ++r) hs[static_cast<std::size_t>(r)] = one(model.curve_s(), g.signal_axis[static_cast<std::size_t>(r)]);
    for (int c = 0; c < g.n_i(); ++c) hi[static_cast<std::size_t>(c)] = one(model.curve_i(), g.idler_axis[static_cast<std::size_t>(c)]);
    GridSums sums;
    for (int r = 0; r < g.n_s(); ++r) {
        for (int c = 0; c < g.n_i(); ++c) {
            const double v = hs[static_cast<std::size_t>(r)] * hi[static_cast<std::size_t>(c)] * std::norm(f.amplitude(r, c));
            sums.full += v;
            if (r % 2 == 0 && c % 2 == 0) sums.half += v;
        }
    }
    sums.full *= g.cell();
    sums.half *= 4.0 * g.cell();
    return sums;
}

template <class Compute>
BrightnessResult converge_brightness(jsa::FrequencyGrid grid, Compute compute) {
    constexpr double tolerance = 0.01;
    double residual = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 3; ++attempt) {
        const GridSums s = compute(grid);
        residual = s.full > 0.0 ? std::abs(s.full - s.half) / s.full : 0.0;
        if (residual < tolerance) {
            BrightnessResult r;
            r.pairs_per_second = s.full;
            r.method = "numeric";
            r.residual = residual;
            r.grid_points = grid.n_s() * grid.n_i();
            return r;
        }
        grid = grid.refined(2);
    }
    throw ConvergenceError(fmt::format("brightness quadrature: half-grid change {:.3g} exceeds 1%", residual), residual);
}

void require_both_pulsed(const SourceModel& model) {
    const auto& c = model.config();
    if (!c.pump1.pulsed() || !c.pump2.pulsed()) throw UnsupportedConfiguration("needs two pulsed pumps");
}

}  // namespace

jsa::FrequencyGrid brightness_grid_pulsed(const SourceModel& model, int n) {
    const auto w = jsa::linear_widths(model);
    return jsa::FrequencyGrid::centered(model.omega_s(), model.omega_i(), 16.0 * w.signal, 16.0 * w.idler, n, n);
}

jsa::FrequencyGrid brightness_grid_mixed(const SourceModel& model) {
    const auto tp = source::temporal_params(model);
    const double sigma = model.config().pump1.sigma;
    constexpr int zeros = 40;
    constexpr int per_lobe = 8;
    const double lobe = 2.0 * pi / std::abs(tp.t1i);
    const double half_i = zeros * lobe;
    const double half_s = 4.0 * sigma + half_i;
    const int n_i = 2 * zeros * per_lobe + 1;
    const int n_s = 2 * static_cast<int>(std::ceil(half_s / (sigma / 6.0))) + 1;
    return jsa::FrequencyGrid::centered(model.omega_s(), model.omega_i(), half_s, half_i, n_s, n_i);
}

namespace {

// Rate prefactor of the pulsed numeric brightness, including the rescaling of
// the L2-normalized envelopes to unit peak (pi s1 s2 / 2 on |F|^2).
double pulsed_prefactor(const SourceModel& model) {
    const auto& c = model.config();
    const double s1 = c.pump1.sigma;
    const double s2 = c.pump2.sigma;
    const double L = model.length();
    const double gamma = source::gamma_sfwm(model);
    const double pref = std::pow(2.0, 5) * model.n1() * model.n2() * speed_of_light * speed_of_light * L * L * gamma *
                        gamma * c.pump1.avg_power * c.pump2.avg_power /
                        (std::pow(pi, 3) * model.omega1() * model.omega2() * s1 * s2 * c.rep_rate);
    return pref * pi * s1 * s2 / 2.0;
}

}  // namespace

BrightnessResult brightness_pulsed_numeric(const SourceModel& model, const jsa::FrequencyGrid& grid) {
    require_both_pulsed(model);
    auto r = converge_brightness(grid, [&](const jsa::FrequencyGrid& g) {
        const auto f = jsa::jsa_pulsed_numeric_raw(model, g);
        return weighted_mass(model, f);
    });
    r.pairs_per_second *= pulsed_prefactor(model);
    return r;
}

// Integrates on a lattice aligned with the JSI: u = nu_s + nu_i along the pump
// envelope, x = Ts nu_s + Ti nu_i along the phasematching function. A
// rectangular (omega_s, omega_i) grid cannot resolve the thin energy ridge
// once B is large.
BrightnessResult brightness_pulsed_numeric(const SourceModel& model) {
    require_both_pulsed(model);
    const auto& c = model.config();
    const auto tp = source::temporal_params(model);
    const double total = c.pump1.sigma * c.pump1.sigma + c.pump2.sigma * c.pump2.sigma;
    const double span_u = 4.0 * std::sqrt(total);
    const double span_x = 16.0 * std::sqrt(1.0 / (tp.B * tp.B) + 4.0 / sinc_gaussian_gamma);
    const double det = tp.Ts - tp.Ti;  // = L (ks' + ki') > 0
    if (!(std::abs(det) > 0.0)) throw PhysicsError("brightness: degenerate signal/idler group delays");

    int n_u = 65, n_x = 257;
    double residual = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 3; ++attempt) {
        const double du = 2.0 * span_u / (n_u - 1);
        const double dx = 2.0 * span_x / (n_x - 1);
        std::vector<double> ws, wi, h;
        ws.reserve(static_cast<std::size_t>(n_u * n_x));
        wi.reserve(ws.capacity());
        h.reserve(ws.capacity());
        for (int a = 0; a < n_u; ++a) {
            const double u = -span_u + a * du;
            for (int b = 0; b < n_x; ++b) {
                const double x = -span_x + b * dx;
                const double nu_s = (x - tp.Ti * u) / det;
                ws.push_back(model.omega_s() + nu_s);
                wi.push_back(model.omega_i() + (u - nu_s));
                h.push_back(h_factor(model, ws.back(), wi.back()));
            }
        }
        const auto f = jsa::pulsed_numeric_points(model, ws, wi);
        GridSums sums;
        for (int a = 0; a < n_u; ++a) {
            for (int b = 0; b < n_x; ++b) {
                const auto j = static_cast<std::size_t>(a * n_x + b);
                const double v = h[j] * std::norm(f.amplitude[j]);
                sums.full += v;
                if (a % 2 == 0 && b % 2 == 0) sums.half += v;
            }
        }
        const double cell = du * dx / std::abs(det);
        sums.full *= cell;
        sums.half *= 4.0 * cell;
        residual = sums.full > 0.0 ? std::abs(sums.full - sums.half) / sums.full : 0.0;
        if (residual < 0.01) {
            BrightnessResult r;
            r.pairs_per_second = sums.full * pulsed_prefactor(model);
            r.method = "numeric";
            r.residual = residual;
            r.grid_points = n_u * n_x;
            return r;
        }
        n_u = 2 * n_u - 1;
        n_x = 2 * n_x - 1;
    }
    throw ConvergenceError(fmt::format("brightness quadrature: half-lattice change {:.3g} exceeds 1%", residual),
                           residual);
}

BrightnessResult brightness_pulsed_closed(const SourceModel& model) {
    require_both_pulsed(model);
    const auto& c = model.config();
    const auto tp = source::temporal_params(model);
    const double gamma = source::gamma_sfwm(model);
    const double h0 = h_factor(model, model.omega_s(), model.omega_i());
    const double bracket = std::erf((1.0 + tp.Lambda) / (2.0 * std::sqrt(2.0) * tp.B)) +
                           std::erf((1.0 - tp.Lambda) / (2.0 * std::sqrt(2.0) * tp.B));
    BrightnessResult r;
    r.method = "closed_form";
    r.pairs_per_second = std::pow(2.0, 5) * model.n1() * model.n2() * speed_of_light * speed_of_light * gamma * gamma *
                         c.pump1.avg_power * c.pump2.avg_power * h0 /
                         (c.rep_rate * (model.k1p() + model.k2p()) * (model.ksp() + model.kip()) * model.omega1() *
                          model.omega2()) *
                         bracket;
    return r;
}

BrightnessResult brightness_mixed_numeric(const SourceModel& model, const jsa::FrequencyGrid& grid) {
    const auto& c = model.config();
    const double sigma = c.pump1.sigma;
    const double L = model.length();
    const double gamma = source::gamma_sfwm(model);
    const double pref = std::pow(2.0, 5.5) * model.n1() * model.n2() * speed_of_light * speed_of_light * L * L *
                        gamma * gamma * c.pump1.avg_power * c.pump2.avg_power /
                        (std::pow(pi, 1.5) * model.omega1() * model.omega2() * sigma);
    const double unit_peak = std::sqrt(pi / 2.0) * sigma;
    auto r = converge_brightness(grid, [&](const jsa::FrequencyGrid& g) {
        const auto f = jsa::jsa_mixed_raw(model, g);
        return weighted_mass(model, f);
    });
    r.pairs_per_second *= pref * unit_peak;
    return r;
}

BrightnessResult brightness_mixed_numeric(const SourceModel& model) {
    return brightness_mixed_numeric(model, brightness_grid_mixed(model));
}

BrightnessResult brightness_mixed_closed(const SourceModel& model) {
    const auto& c = model.config();
    if (!c.mixed()) throw UnsupportedConfiguration("mixed-pump brightness needs pulsed pump 1 and monochromatic pump 2");
    const double gamma = source::gamma_sfwm(model);
    const double h0 = h_factor(model, model.omega_s(), model.omega_i());
    BrightnessResult r;
    r.method = "closed_form";
    r.pairs_per_second = std::pow(2.0, 6) * model.n1() * model.n2() * speed_of_light * speed_of_light * gamma * gamma *
                         c.pump1.avg_power * c.pump2.avg_power * model.length() * h0 /
                         (model.omega1() * model.omega2() * std::abs(model.ksp() + model.kip()));
    return r;
}

double effective_length(const SourceModel& model) {
    const auto& c = model.config();
    const auto tp = source::temporal_params(model);
    if (!(tp.Lambda > -1.0)) throw PhysicsError(fmt::format("effective length undefined for Lambda = {}", tp.Lambda));
    const double s1 = c.pump1.sigma;
    const double s2 = c.pump2.sigma;
    return 4.0 * std::sqrt(2.0) * std::sqrt(s1 * s1 + s2 * s2) /
           ((1.0 + tp.Lambda) * (model.k1p() + model.k2p()) * s1 * s2);
}

double factorability_threshold_pulsed(const SourceModel& model) {
    const auto& c = model.config();
    const double s1 = c.pump1.sigma;
    const double s2 = c.pump2.sigma;
    return std::sqrt(s1 * s1 + s2 * s2) /
           (constants::factorable_b_threshold * (model.k1p() + model.k2p()) * s1 * s2);
}

double factorability_threshold_mixed(const SourceModel& model) {
    const double sigma = model.config().pump1.sigma;
    return 2.0 / (sigma * std::sqrt(sinc_gaussian_gamma) * (model.k1p() + model.k2p()));
}

double idler_bandwidth(const SourceModel& model) {
    return 2.0 / (std::sqrt(sinc_gaussian_gamma) * model.length() * (model.k1p() + model.k2p()));
}

double length_for_bandwidth(const SourceModel& model, double delta_omega) {
    if (!(delta_omega > 0.0)) throw std::invalid_argument("length_for_bandwidth: bandwidth must be > 0");
    return 2.0 / (std::sqrt(sinc_gaussian_gamma) * delta_omega * (model.k1p() + model.k2p()));
}

double marginal_fwhm(const JointSpectrum& f, Axis axis) {
    const bool sig = axis == Axis::signal;
    const auto& x = sig ? f.grid.signal_axis : f.grid.idler_axis;
    const Eigen::ArrayXXd intensity = f.amplitude.array().abs2();
    const Eigen::ArrayXd m = sig ? Eigen::ArrayXd(intensity.rowwise().sum()) : Eigen::ArrayXd(intensity.colwise().sum().transpose());
    const int n = static_cast<int>(m.size());

    const double peak = m.maxCoeff();
    if (!(peak > 0.0)) throw PhysicsError("marginal_fwhm: zero marginal");
    int first = -1;
    int last = -1;
    for (int j = 0; j < n; ++j) {
        if (m[j] == peak) {
            if (first < 0) first = j;
            last = j;
        }
    }
    const double half = 0.5 * peak;

    int l = first;
    while (l > 0 && m[l - 1] >= half) --l;
    int r = last;
    while (r < n - 1 && m[r + 1] >= half) ++r;
    if (l == 0 || r == n - 1) throw PhysicsError("marginal_fwhm: half maximum not reached inside the grid");

    const auto ul = static_cast<std::size_t>(l);
    const auto ur = static_cast<std::size_t>(r);
    const double xl = x[ul - 1] + (half - m[l - 1]) / (m[l] - m[l - 1]) * (x[ul] - x[ul - 1]);
    const double xr = x[ur] + (m[r] - half) / (m[r] - m[r + 1]) * (x[ur + 1] - x[ur]);

    for (int j = 1; j < n - 1; ++j) {
        if (j >= l && j <= r) continue;
        if (m[j] > half && m[j] >= m[j - 1] && m[j] >= m[j + 1]) {
            throw PhysicsError("marginal_fwhm: marginal has a second lobe above half maximum");
        }
    }
    return xr - xl;
}

IntermodalOffsets intermodal_offsets(const dispersion::FiberSpec& fiber, double lambda1_m, double lambda2_m,
                                     dispersion::ModeId mode_x) {
    const dispersion::ModeCurve fundamental(fiber, dispersion::ModeId::lp01());
    const double w1 = constants::omega_from_wavelength(lambda1_m);
    const double w2 = constants::omega_from_wavelength(lambda2_m);
    IntermodalOffsets out;
    out.mode = mode_x;
    if (mode_x == dispersion::ModeId::lp01()) {
        out.delta = 0.0;
    } else {
        const dispersion::ModeCurve higher(fiber, mode_x);
        static_cast<void>(higher.k(w2));  // pump 2 must be guided in X
        out.delta = source::phasematching_offset(fundamental, higher, higher, fundamental, w1, w2);
    }
    out.lambda_s = out.delta == 0.0 ? lambda1_m : constants::wavelength_from_omega(w1 + out.delta);
    out.lambda_i = out.delta == 0.0 ? lambda2_m : constants::wavelength_from_omega(w2 - out.delta);
    out.dlambda_s = out.lambda_s - lambda1_m;
    out.dlambda_i = out.lambda_i - lambda2_m;
    return out;
}

}  // namespace cpsfwm::metrics
