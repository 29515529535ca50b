#include "cpsfwm/source.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "cpsfwm/constants.hpp"
#include "cpsfwm/errors.hpp"

namespace cpsfwm::source {

using constants::pi;
using constants::speed_of_light;
using constants::vacuum_permittivity;

void PumpConfig::validate(const char* name) const {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError(std::string(name) + ": omega0 must be > 0");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError(std::string(name) + ": sigma must be >= 0");
    if (!(avg_power >= 0.0) || !std::isfinite(avg_power)) {
        throw ConfigError(std::string(name) + ": avg_power must be >= 0");
    }
    if (mode.l < 0 || mode.m < 1) throw ConfigError(std::string(name) + ": invalid mode");
}

void SourceConfig::validate() const {
    fiber.validate();
    pump1.validate("pump1");
    pump2.validate("pump2");
    if ((pump1.pulsed() || pump2.pulsed()) && !(rep_rate > 0.0)) {
        throw ConfigError("rep_rate must be > 0 for pulsed pumps");
    }
    if (!std::isfinite(tau)) throw ConfigError("tau must be finite");
    if (!(chi3 > 0.0)) throw ConfigError("chi3 must be > 0");
}

bool SourceConfig::same_mode() const {
    return pump1.mode == pump2.mode && signal_mode == pump1.mode && idler_mode == pump1.mode;
}

SourceConfig make_source(const FiberSpec& fiber, double lambda1_m, double sigma1, double lambda2_m, double sigma2,
                         ModeId mode) {
    SourceConfig cfg;
    cfg.fiber = fiber;
    cfg.pump1 = {constants::omega_from_wavelength(lambda1_m), sigma1, 0.05, mode};
    cfg.pump2 = {constants::omega_from_wavelength(lambda2_m), sigma2, 0.05, mode};
    cfg.signal_mode = mode;
    cfg.idler_mode = mode;
    return cfg;
}

double pump_envelope(const PumpConfig& pump, double omega) {
    if (!pump.pulsed()) throw UnsupportedConfiguration("monochromatic pump has no spectral envelope");
    const double d = (omega - pump.omega0) / pump.sigma;
    return std::pow(2.0 / pi, 0.25) / std::sqrt(pump.sigma) * std::exp(-d * d);
}

double phasematching_offset(const ModeCurve& k1, const ModeCurve& k2, const ModeCurve& ks, const ModeCurve& ki,
                            double omega1, double omega2) {
    if (&ks == &k1 && &ki == &k2) return 0.0;
    const double base = k1.k(omega1) - k2.k(omega2);
    auto mismatch = [&](double d) -> std::optional<double> {
        try {
            return base - ks.k(omega1 + d) + ki.k(omega2 - d);
        } catch (const PhysicsError&) {
            return std::nullopt;
        }
    };

    const double limit = 0.15 * omega2;
    constexpr int steps = 600;
    std::optional<double> best;
    double best_lo = 0.0, best_hi = 0.0;
    double prev_d = -limit;
    auto prev_f = mismatch(prev_d);
    for (int j = 1; j <= steps; ++j) {
        const double d = -limit + 2.0 * limit * j / steps;
        const auto f = mismatch(d);
        if (prev_f && f && ((*prev_f < 0.0) != (*f < 0.0) || *f == 0.0)) {
            const double mid = 0.5 * (prev_d + d);
            if (!best || std::abs(mid) < std::abs(*best)) {
                best = mid;
                best_lo = prev_d;
                best_hi = d;
            }
        }
        prev_d = d;
        prev_f = f;
    }
    if (!best) {
        std::ostringstream msg;
        msg << "no phasematched offset within |delta| <= " << limit << " rad/s for signal " << ks.mode().name()
            << ", idler " << ki.mode().name();
        throw PhysicsError(msg.str());
    }
    double lo = best_lo;
    double hi = best_hi;
    double flo = *mismatch(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = *mismatch(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SourceModel::SourceModel(SourceConfig config) : config_(std::move(config)) {
    config_.validate();
    std::map<ModeId, std::shared_ptr<const ModeCurve>> curves;
    auto curve = [&](ModeId m) {
        auto& slot = curves[m];
        if (!slot) slot = std::make_shared<const ModeCurve>(config_.fiber, m);
        return slot;
    };
    c1_ = curve(config_.pump1.mode);
    c2_ = curve(config_.pump2.mode);
    cs_ = curve(config_.signal_mode);
    ci_ = curve(config_.idler_mode);
    delta_ = phasematching_offset(*c1_, *c2_, *cs_, *ci_, omega1(), omega2());
    resolve();
}

void SourceModel::resolve() {
    omega_s_ = omega1() + delta_;
    omega_i_ = omega2() - delta_;
    k1p_ = c1_->k_prime(omega1());
    k2p_ = c2_->k_prime(omega2());
    ksp_ = cs_->k_prime(omega_s_);
    kip_ = ci_->k_prime(omega_i_);
}

double SourceModel::n1() const { return c1_->n_eff(omega1()); }
double SourceModel::n2() const { return c2_->n_eff(omega2()); }

SourceModel SourceModel::with_length(double length) const {
    SourceModel copy(*this);
    copy.config_.fiber.length = length;
    copy.config_.validate();
    return copy;
}

SourceModel SourceModel::with_bandwidths(double sigma1, double sigma2) const {
    SourceModel copy(*this);
    copy.config_.pump1.sigma = sigma1;
    copy.config_.pump2.sigma = sigma2;
    copy.config_.validate();
    return copy;
}

TemporalParams temporal_params(const SourceModel& model) {
    const double L = model.length();
    const double k1 = model.k1p();
    const double k2 = model.k2p();
    const double ks = model.ksp();
    const double ki = model.kip();
    const double s1 = model.config().pump1.sigma;
    const double s2 = model.config().pump2.sigma;

    TemporalParams tp;
    tp.t12 = L * (k1 + k2);
    tp.tau12 = L * (k1 - k2);
    tp.t1s = L * (k1 + ks);
    tp.tau1s = L * (k1 - ks);
    tp.t1i = L * (k1 + ki);
    tp.tau1i = L * (k1 - ki);
    tp.t2s = L * (k2 + ks);
    tp.tau2s = L * (k2 - ks);
    tp.t2i = L * (k2 + ki);
    tp.tau2i = L * (k2 - ki);

    const double total = s1 * s1 + s2 * s2;
    const double share1 = total > 0.0 ? s1 * s1 / total : 0.0;
    tp.Ts = tp.t2s - share1 * tp.t12;
    tp.Ti = tp.tau2i - share1 * tp.t12;
    tp.B = (s1 > 0.0 && s2 > 0.0) ? std::sqrt(total) / (tp.t12 * s1 * s2) : std::numeric_limits<double>::infinity();
    tp.Lambda = (2.0 * model.config().tau + tp.tau12) / tp.t12;
    return tp;
}

namespace {

double wavelength(double omega) { return constants::wavelength_from_omega(omega); }

double kerr_prefactor(double chi3) { return 3.0 * chi3 / (4.0 * vacuum_permittivity * speed_of_light * speed_of_light); }

}  // namespace

double gamma_sfwm(const SourceModel& model) {
    const auto& cfg = model.config();
    const double f = dispersion::overlap_four(
        cfg.fiber, {cfg.pump1.mode, cfg.pump2.mode, cfg.signal_mode, cfg.idler_mode},
        {wavelength(model.omega1()), wavelength(model.omega2()), wavelength(model.omega_s()), wavelength(model.omega_i())});
    return kerr_prefactor(cfg.chi3) * std::sqrt(model.omega1() * model.omega2()) * f / (model.n1() * model.n2());
}

PhaseModulation phase_modulation(const SourceModel& model) {
    const auto& cfg = model.config();
    const double pre = kerr_prefactor(cfg.chi3);
    struct Wave {
        ModeId mode;
        double omega;
        double n;
    };
    const Wave w1{cfg.pump1.mode, model.omega1(), model.n1()};
    const Wave w2{cfg.pump2.mode, model.omega2(), model.n2()};
    const Wave ws{cfg.signal_mode, model.omega_s(), model.curve_s().n_eff(model.omega_s())};
    const Wave wi{cfg.idler_mode, model.omega_i(), model.curve_i().n_eff(model.omega_i())};

    auto cross = [&](const Wave& mu, const Wave& nu) {
        const double f = dispersion::overlap_two(cfg.fiber, mu.mode, nu.mode, wavelength(mu.omega), wavelength(nu.omega));
        return pre * mu.omega * f / (mu.n * nu.n);
    };
    auto self = [&](const Wave& nu) {
        const double f = dispersion::overlap_self(cfg.fiber, nu.mode, wavelength(nu.omega));
        return pre * nu.omega * f / (nu.n * nu.n);
    };

    PhaseModulation pm;
    pm.gamma1 = self(w1);
    pm.gamma2 = self(w2);
    pm.gamma21 = cross(w2, w1);
    pm.gamma12 = cross(w1, w2);
    pm.gamma_s1 = cross(ws, w1);
    pm.gamma_i1 = cross(wi, w1);
    pm.gamma_s2 = cross(ws, w2);
    pm.gamma_i2 = cross(wi, w2);

    const double root2pi = std::sqrt(2.0 * pi);
    pm.peak_power1 = cfg.pump1.pulsed() ? cfg.pump1.avg_power * cfg.pump1.sigma / (root2pi * cfg.rep_rate)
                                        : cfg.pump1.avg_power;
    pm.peak_power2 = cfg.pump2.pulsed() ? cfg.pump2.avg_power * cfg.pump2.sigma / (root2pi * cfg.rep_rate)
                                        : cfg.pump2.avg_power;
    return pm;
}

double nonlinear_phase_forced(const SourceModel& model) {
    const auto pm = phase_modulation(model);
    const double bracket1 = pm.gamma1 - 2.0 * pm.gamma21 - 2.0 * pm.gamma_s1 + 2.0 * pm.gamma_i1;
    const double bracket2 = pm.gamma2 - 2.0 * pm.gamma12 + 2.0 * pm.gamma_s2 - 2.0 * pm.gamma_i2;
    return bracket1 * pm.peak_power1 - bracket2 * pm.peak_power2;
}

double nonlinear_phase(const SourceModel& model) {
    return model.config().include_phi_nl ? nonlinear_phase_forced(model) : 0.0;
}

double theta_si(const SourceConfig& cfg) {
    const double a = cfg.pump1.sigma * cfg.pump1.sigma;
    const double b = cfg.pump2.sigma * cfg.pump2.sigma;
    return std::atan2(b, a) * 180.0 / pi;
}

double theta_si(const TemporalParams& tp) { return std::atan(-tp.Ts / tp.Ti) * 180.0 / pi; }

}  // namespace cpsfwm::source
