#include "cpsfwm/jsa.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cpsfwm/constants.hpp"
#include "cpsfwm/errors.hpp"
#include "cpsfwm/numerics.hpp"

namespace cpsfwm::jsa {

using constants::pi;
using constants::sinc_gaussian_gamma;
using numerics::sinc;

FrequencyGrid FrequencyGrid::centered(double center_s, double center_i, double half_span_s, double half_span_i,
                                      int n_s, int n_i) {
    if (n_s < 3 || n_i < 3 || n_s % 2 == 0 || n_i % 2 == 0) {
        throw std::invalid_argument("grid point counts must be odd and >= 3");
    }
    if (!(half_span_s > 0.0) || !(half_span_i > 0.0)) throw std::invalid_argument("grid spans must be > 0");
    FrequencyGrid g;
    g.center_s = center_s;
    g.center_i = center_i;
    g.half_span_s = half_span_s;
    g.half_span_i = half_span_i;
    auto axis = [](double c, double h, int n) {
        std::vector<double> a(static_cast<std::size_t>(n));
        const int mid = (n - 1) / 2;
        const double step = 2.0 * h / (n - 1);
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = c + (j - mid) * step;
        return a;
    };
    g.signal_axis = axis(center_s, half_span_s, n_s);
    g.idler_axis = axis(center_i, half_span_i, n_i);
    return g;
}

FrequencyGrid FrequencyGrid::refined(int factor) const {
    return centered(center_s, center_i, half_span_s, half_span_i, (n_s() - 1) * factor + 1, (n_i() - 1) * factor + 1);
}

void JointSpectrum::normalize() {
    const double m = mass();
    if (!(m > 0.0) || !std::isfinite(m)) throw PhysicsError("joint spectrum vanishes on the grid");
    amplitude /= std::sqrt(m);
    normalized = true;
}

// ---------------------------------------------------------------------------

double delta_k_pulsed(const SourceModel& model, double omega, double omega_s, double omega_i, double phi_nl) {
    const double omega2 = omega_i + (omega_s - omega);
    return (model.curve1().k(omega) - model.curve_s().k(omega_s)) -
           (model.curve2().k(omega2) - model.curve_i().k(omega_i)) + phi_nl;
}

double kappa_pulsed(const SourceModel& model, double omega, double omega_s, double omega_i) {
    const double omega2 = omega_i + (omega_s - omega);
    return model.curve1().k(omega) + model.curve2().k(omega2) + model.curve_s().k(omega_s) +
           model.curve_i().k(omega_i);
}

double delta_k_mixed(const SourceModel& model, double omega_s, double omega_i, double phi_nl) {
    const double omega_cw = model.omega2();
    const double omega1 = omega_s + (omega_i - omega_cw);
    return (model.curve1().k(omega1) - model.curve_s().k(omega_s)) -
           (model.curve2().k(omega_cw) - model.curve_i().k(omega_i)) + phi_nl;
}

double kappa_mixed(const SourceModel& model, double omega_s, double omega_i) {
    const double omega_cw = model.omega2();
    const double omega1 = omega_s + (omega_i - omega_cw);
    return model.curve1().k(omega1) + model.curve2().k(omega_cw) + model.curve_s().k(omega_s) +
           model.curve_i().k(omega_i);
}

cdouble phi_p(double x, double B, double Lambda) {
    if (!(B > 0.0) || !std::isfinite(B)) throw std::invalid_argument("phi_p: B must be finite and > 0");
    const double a1 = (1.0 + Lambda) / (4.0 * B);
    const double a2 = (1.0 - Lambda) / (4.0 * B);
    const double b = B * x;
    return numerics::scaled_erf(a1, b) + numerics::scaled_erf(a2, -b);
}

namespace {

void require_pulsed(const SourceModel& model) {
    const auto& c = model.config();
    if (!c.pump1.pulsed() || !c.pump2.pulsed()) {
        throw UnsupportedConfiguration("pulsed-pump JSA needs both pump bandwidths > 0");
    }
}

void require_mixed(const SourceModel& model) {
    const auto& c = model.config();
    if (!c.pump1.pulsed() && !c.pump2.pulsed()) {
        throw UnsupportedConfiguration("both pumps monochromatic: not treated");
    }
    if (!c.mixed()) throw UnsupportedConfiguration("mixed-pump JSA needs pulsed pump 1 and monochromatic pump 2");
}

// Inner integral of the pulsed JSA for one (omega_s, omega_i) node.
class PulsedIntegrand {
public:
    PulsedIntegrand(const SourceModel& model, double phi_nl)
        : model_(model), phi_nl_(phi_nl), L_(model.length()), tau_(model.config().tau) {
        const auto& c = model.config();
        s1_ = c.pump1.sigma;
        s2_ = c.pump2.sigma;
        total_ = s1_ * s1_ + s2_ * s2_;
        sigma_w_ = s1_ * s2_ / std::sqrt(total_);
        norm_ = std::sqrt(2.0 / pi) / std::sqrt(s1_ * s2_);
        kappa_ref_ = kappa_pulsed(model, model.omega1(), model.omega_s(), model.omega_i());
    }

    [[nodiscard]] double sigma_w() const { return sigma_w_; }

    struct Value {
        cdouble integral;
        double absolute;
    };

    // rule is on [-1, 1]; the window is mapped around the Gaussian peak.
    [[nodiscard]] Value operator()(double omega_s, double omega_i, const numerics::QuadratureRule& rule) const {
        const double nu_sum = (omega_s - model_.omega_s()) + (omega_i - model_.omega_i());
        const double nu_c = s1_ * s1_ * nu_sum / total_;
        const double half = 6.0 * sigma_w_;
        const double ks = model_.curve_s().k(omega_s);
        const double ki = model_.curve_i().k(omega_i);
        cdouble acc = 0.0;
        double abs_acc = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double a = nu_c + half * rule.nodes[q];  // omega - omega1
            const double omega = model_.omega1() + a;
            const double b = nu_sum - a;  // omega2' - omega2
            const double env = norm_ * std::exp(-(a * a) / (s1_ * s1_) - (b * b) / (s2_ * s2_));
            if (env == 0.0) continue;
            const double omega2 = omega_i + (omega_s - omega);
            const double k1 = model_.curve1().k(omega);
            const double k2 = model_.curve2().k(omega2);
            const double dk = (k1 - ks) - (k2 - ki) + phi_nl_;
            const double kappa = k1 + k2 + ks + ki;
            const double mag = env * sinc(0.5 * L_ * dk);
            const double phase = 0.5 * L_ * (kappa - kappa_ref_) + a * tau_;
            acc += rule.weights[q] * mag * cdouble(std::cos(phase), std::sin(phase));
            abs_acc += rule.weights[q] * std::abs(mag);
        }
        return {acc * half, abs_acc * half};
    }

private:
    const SourceModel& model_;
    double phi_nl_;
    double L_;
    double tau_;
    double s1_ = 0, s2_ = 0, total_ = 0, sigma_w_ = 0, norm_ = 0, kappa_ref_ = 0;
};

std::vector<int> subsample(int n) {
    const int stride = std::max(1, (n - 1) / 32);
    std::vector<int> idx;
    for (int j = 0; j < n; j += stride) idx.push_back(j);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

struct NodeChoice {
    int nodes = 0;
    double residual = 0.0;
};

// Doubles the inner node count until the probe points stop moving.
NodeChoice choose_nodes(const SourceModel& model, const PulsedIntegrand& integrand,
                        const std::vector<std::pair<double, double>>& probes, QuadOptions quad) {
    // Start with enough nodes for the oscillation count of sinc and exp(i omega tau).
    const double window = 12.0 * integrand.sigma_w();
    const double t12 = model.length() * (model.k1p() + model.k2p());
    const double periods = window * (0.5 * t12 + std::abs(model.config().tau)) / (2.0 * pi);
    int n = quad.initial_nodes;
    while (n < 4.0 * periods && n < quad.max_nodes) n *= 2;

    auto probe = [&](int nodes, double& absolute) {
        const auto rule = numerics::gauss_legendre(nodes, -1.0, 1.0);
        std::vector<cdouble> out;
        out.reserve(probes.size());
        absolute = 0.0;
        for (const auto& [ws, wi] : probes) {
            const auto v = integrand(ws, wi, rule);
            out.push_back(v.integral);
            absolute += v.absolute * v.absolute;
        }
        absolute = std::sqrt(absolute);
        return out;
    };

    double abs_coarse = 0.0;
    auto coarse = probe(n, abs_coarse);
    double residual = std::numeric_limits<double>::infinity();
    for (;;) {
        if (2 * n > quad.max_nodes) {
            throw ConvergenceError(fmt::format("inner quadrature did not converge with {} nodes (residual {:.3g})", n,
                                               residual),
                                   residual);
        }
        double abs_fine = 0.0;
        const auto fine = probe(2 * n, abs_fine);
        double diff = 0.0;
        double norm = 0.0;
        for (std::size_t j = 0; j < fine.size(); ++j) {
            diff += std::norm(fine[j] - coarse[j]);
            norm += std::norm(fine[j]);
        }
        diff = std::sqrt(diff);
        norm = std::sqrt(norm);
        residual = norm > 0.0 ? diff / norm : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        // Second test: total cancellation (pumps that never meet) leaves only noise.
        if (diff <= quad.tolerance * norm || diff <= 1e-10 * abs_fine) break;
        n *= 2;
        coarse = fine;
    }
    return {n, residual};
}

}  // namespace

JointSpectrum jsa_pulsed_numeric_raw(const SourceModel& model, const FrequencyGrid& grid, QuadOptions quad) {
    require_pulsed(model);
    const double phi_nl = source::nonlinear_phase(model);
    const PulsedIntegrand integrand(model, phi_nl);

    std::vector<std::pair<double, double>> probes;
    for (int r : subsample(grid.n_s()))
        for (int c : subsample(grid.n_i()))
            probes.emplace_back(grid.signal_axis[static_cast<std::size_t>(r)], grid.idler_axis[static_cast<std::size_t>(c)]);
    const auto choice = choose_nodes(model, integrand, probes, quad);

    JointSpectrum f;
    f.grid = grid;
    f.method = "pulsed_numeric";
    f.quad_nodes = choice.nodes;
    f.quad_residual = choice.residual;
    f.amplitude.resize(grid.n_s(), grid.n_i());
    const auto rule = numerics::gauss_legendre(choice.nodes, -1.0, 1.0);
    for (int r = 0; r < grid.n_s(); ++r) {
        for (int c = 0; c < grid.n_i(); ++c) {
            f.amplitude(r, c) = integrand(grid.signal_axis[static_cast<std::size_t>(r)],
                                          grid.idler_axis[static_cast<std::size_t>(c)], rule)
                                    .integral;
        }
    }
    f.raw_mass = f.mass();
    return f;
}

PointSpectrum pulsed_numeric_points(const SourceModel& model, const std::vector<double>& omega_s,
                                    const std::vector<double>& omega_i, QuadOptions quad) {
    require_pulsed(model);
    if (omega_s.size() != omega_i.size() || omega_s.empty())
        throw std::invalid_argument("pulsed_numeric_points: need matching, non-empty coordinate lists");
    const PulsedIntegrand integrand(model, source::nonlinear_phase(model));
    const std::size_t stride = std::max<std::size_t>(1, omega_s.size() / 1024);
    std::vector<std::pair<double, double>> probes;
    for (std::size_t j = 0; j < omega_s.size(); j += stride) probes.emplace_back(omega_s[j], omega_i[j]);
    const auto choice = choose_nodes(model, integrand, probes, quad);

    PointSpectrum out;
    out.quad_nodes = choice.nodes;
    out.quad_residual = choice.residual;
    out.amplitude.resize(omega_s.size());
    const auto rule = numerics::gauss_legendre(choice.nodes, -1.0, 1.0);
    for (std::size_t j = 0; j < omega_s.size(); ++j) out.amplitude[j] = integrand(omega_s[j], omega_i[j], rule).integral;
    return out;
}

JointSpectrum jsa_pulsed_numeric(const SourceModel& model, const FrequencyGrid& grid, QuadOptions quad) {
    auto f = jsa_pulsed_numeric_raw(model, grid, quad);
    f.normalize();
    return f;
}

JointSpectrum jsa_pulsed_linear(const SourceModel& model, const FrequencyGrid& grid) {
    require_pulsed(model);
    const auto tp = source::temporal_params(model);
    const auto& c = model.config();
    const double total = c.pump1.sigma * c.pump1.sigma + c.pump2.sigma * c.pump2.sigma;
    JointSpectrum f;
    f.grid = grid;
    f.method = "pulsed_linear";
    f.amplitude.resize(grid.n_s(), grid.n_i());
    for (int r = 0; r < grid.n_s(); ++r) {
        const double nu_s = grid.signal_axis[static_cast<std::size_t>(r)] - model.omega_s();
        for (int col = 0; col < grid.n_i(); ++col) {
            const double nu_i = grid.idler_axis[static_cast<std::size_t>(col)] - model.omega_i();
            const double s = nu_s + nu_i;
            f.amplitude(r, col) = std::exp(-s * s / total) * phi_p(tp.Ts * nu_s + tp.Ti * nu_i, tp.B, tp.Lambda);
        }
    }
    f.raw_mass = f.mass();
    f.normalize();
    return f;
}

JointSpectrum jsa_mixed_raw(const SourceModel& model, const FrequencyGrid& grid) {
    require_mixed(model);
    const double phi_nl = source::nonlinear_phase(model);
    const double L = model.length();
    const double sigma = model.config().pump1.sigma;
    const double norm = std::pow(2.0 / pi, 0.25) / std::sqrt(sigma);
    const double kappa_ref = kappa_mixed(model, model.omega_s(), model.omega_i());
    JointSpectrum f;
    f.grid = grid;
    f.method = "mixed_numeric";
    f.amplitude.resize(grid.n_s(), grid.n_i());
    for (int r = 0; r < grid.n_s(); ++r) {
        const double ws = grid.signal_axis[static_cast<std::size_t>(r)];
        for (int col = 0; col < grid.n_i(); ++col) {
            const double wi = grid.idler_axis[static_cast<std::size_t>(col)];
            const double nu = (ws - model.omega_s()) + (wi - model.omega_i());
            const double env = norm * std::exp(-nu * nu / (sigma * sigma));
            const double dk = delta_k_mixed(model, ws, wi, phi_nl);
            const double phase = 0.5 * L * (kappa_mixed(model, ws, wi) - kappa_ref);
            f.amplitude(r, col) = env * sinc(0.5 * L * dk) * cdouble(std::cos(phase), std::sin(phase));
        }
    }
    f.raw_mass = f.mass();
    return f;
}

JointSpectrum jsa_mixed(const SourceModel& model, const FrequencyGrid& grid) {
    auto f = jsa_mixed_raw(model, grid);
    f.normalize();
    return f;
}

JointSpectrum jsa_mixed_linear(const SourceModel& model, const FrequencyGrid& grid) {
    require_mixed(model);
    const auto tp = source::temporal_params(model);
    const double sigma = model.config().pump1.sigma;
    JointSpectrum f;
    f.grid = grid;
    f.method = "mixed_linear";
    f.amplitude.resize(grid.n_s(), grid.n_i());
    for (int r = 0; r < grid.n_s(); ++r) {
        const double nu_s = grid.signal_axis[static_cast<std::size_t>(r)] - model.omega_s();
        for (int col = 0; col < grid.n_i(); ++col) {
            const double nu_i = grid.idler_axis[static_cast<std::size_t>(col)] - model.omega_i();
            const double s = nu_s + nu_i;
            const double phase = tp.t1s * nu_s + tp.t1i * nu_i;
            f.amplitude(r, col) = std::exp(-s * s / (sigma * sigma)) * sinc(0.5 * (tp.tau1s * nu_s + tp.t1i * nu_i)) *
                                  cdouble(std::cos(phase), std::sin(phase));
        }
    }
    f.raw_mass = f.mass();
    f.normalize();
    return f;
}

MarginalWidths linear_widths(const SourceModel& model) {
    const auto& c = model.config();
    const auto tp = source::temporal_params(model);
    Eigen::Matrix2d A;
    double fallback = 0.0;
    if (c.pump1.pulsed() && c.pump2.pulsed()) {
        const double total = c.pump1.sigma * c.pump1.sigma + c.pump2.sigma * c.pump2.sigma;
        const double wx2 = 1.0 / (tp.B * tp.B) + 4.0 / sinc_gaussian_gamma;
        const Eigen::Vector2d t(tp.Ts, tp.Ti);
        A = (2.0 / total) * Eigen::Matrix2d::Ones() + (2.0 / wx2) * t * t.transpose();
        fallback = std::sqrt(total);
    } else {
        require_mixed(model);
        const double sigma = c.pump1.sigma;
        const Eigen::Vector2d t(tp.tau1s, tp.t1i);
        A = (2.0 / (sigma * sigma)) * Eigen::Matrix2d::Ones() + (0.5 * sinc_gaussian_gamma) * t * t.transpose();
        fallback = sigma;
    }
    const double det = A.determinant();
    if (!(det > 1e-12 * A.squaredNorm())) return {0.5 * fallback, 0.5 * fallback};
    const Eigen::Matrix2d cov = (2.0 * A).inverse();
    return {std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1))};
}

FrequencyGrid default_grid(const SourceModel& model, int n, double span_widths) {
    const auto w = linear_widths(model);
    return FrequencyGrid::centered(model.omega_s(), model.omega_i(), span_widths * w.signal, span_widths * w.idler, n,
                                   n);
}

double overlap(const JointSpectrum& a, const JointSpectrum& b) {
    if (a.amplitude.rows() != b.amplitude.rows() || a.amplitude.cols() != b.amplitude.cols()) {
        throw std::invalid_argument("overlap: spectra on different grids");
    }
    const Eigen::ArrayXXd ma = a.amplitude.array().abs();
    const Eigen::ArrayXXd mb = b.amplitude.array().abs();
    const double denom = std::sqrt(ma.square().sum() * mb.square().sum());
    if (!(denom > 0.0)) throw PhysicsError("overlap: zero spectrum");
    return (ma * mb).sum() / denom;
}

JointSpectrum transposed(const JointSpectrum& f) {
    JointSpectrum t = f;
    t.amplitude = f.amplitude.transpose();
    std::swap(t.grid.signal_axis, t.grid.idler_axis);
    std::swap(t.grid.center_s, t.grid.center_i);
    std::swap(t.grid.half_span_s, t.grid.half_span_i);
    return t;
}

void write_csv(std::ostream& out, const JointSpectrum& f) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "omega_s_rad_s,omega_i_rad_s,re,im,intensity\n");
    for (int r = 0; r < f.grid.n_s(); ++r) {
        for (int c = 0; c < f.grid.n_i(); ++c) {
            const cdouble v = f.amplitude(r, c);
            fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                           f.grid.signal_axis[static_cast<std::size_t>(r)],
                           f.grid.idler_axis[static_cast<std::size_t>(c)], v.real(), v.imag(), std::norm(v));
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_json(std::ostream& out, const JointSpectrum& f) {
    nlohmann::json j;
    j["method"] = f.method;
    j["normalized"] = f.normalized;
    j["raw_mass"] = f.raw_mass;
    j["quad_nodes"] = f.quad_nodes;
    j["quad_residual"] = f.quad_residual;
    j["grid"] = {{"center_s_rad_s", f.grid.center_s},
                 {"center_i_rad_s", f.grid.center_i},
                 {"half_span_s_rad_s", f.grid.half_span_s},
                 {"half_span_i_rad_s", f.grid.half_span_i},
                 {"signal_axis_rad_s", f.grid.signal_axis},
                 {"idler_axis_rad_s", f.grid.idler_axis}};
    nlohmann::json mag = nlohmann::json::array();
    nlohmann::json phase = nlohmann::json::array();
    for (int r = 0; r < f.grid.n_s(); ++r) {
        std::vector<double> m(static_cast<std::size_t>(f.grid.n_i()));
        std::vector<double> p(m.size());
        for (int c = 0; c < f.grid.n_i(); ++c) {
            m[static_cast<std::size_t>(c)] = std::abs(f.amplitude(r, c));
            p[static_cast<std::size_t>(c)] = std::arg(f.amplitude(r, c));
        }
        mag.push_back(std::move(m));
        phase.push_back(std::move(p));
    }
    j["magnitude"] = std::move(mag);
    j["phase"] = std::move(phase);
    out << j.dump() << '\n';
}

}  // namespace cpsfwm::jsa
