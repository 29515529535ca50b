#pragma once

// Experiment description (fiber, two counter-propagating pumps, mode
// assignment) and the scalar parameters derived from it.

#include <map>
#include <memory>
#include <string>

#include "cpsfwm/dispersion.hpp"

namespace cpsfwm::source {

using dispersion::FiberSpec;
using dispersion::ModeCurve;
using dispersion::ModeId;

struct PumpConfig {
    double omega0 = 0.0;     // rad/s
    double sigma = 0.0;      // rad/s; 0 = monochromatic
    double avg_power = 0.0;  // W (for a monochromatic pump, its power)
    ModeId mode{};

    [[nodiscard]] bool pulsed() const { return sigma > 0.0; }
    void validate(const char* name) const;
    auto operator<=>(const PumpConfig&) const = default;
};

struct SourceConfig {
    FiberSpec fiber{};
    PumpConfig pump1{};  // forward
    PumpConfig pump2{};  // backward
    ModeId signal_mode{};
    ModeId idler_mode{};
    double rep_rate = 80e6;  // Hz
    double tau = 0.0;        // s, arrival-time difference of the pumps
    double chi3 = 1.9e-22;   // m^2/V^2
    bool include_phi_nl = false;

    void validate() const;
    [[nodiscard]] bool mixed() const { return pump1.pulsed() && !pump2.pulsed(); }
    [[nodiscard]] bool same_mode() const;
    auto operator<=>(const SourceConfig&) const = default;
};

/// Convenience constructor: all four waves in `mode`, pumps given by vacuum
/// wavelength and angular bandwidth.
SourceConfig make_source(const FiberSpec& fiber, double lambda1_m, double sigma1, double lambda2_m, double sigma2,
                         ModeId mode = ModeId::lp01());

struct TemporalParams {
    double t12 = 0, tau12 = 0;
    double t1s = 0, tau1s = 0;
    double t1i = 0, tau1i = 0;
    double t2s = 0, tau2s = 0;
    double t2i = 0, tau2i = 0;
    double Ts = 0, Ti = 0;
    double B = 0;  // +inf when either pump is monochromatic
    double Lambda = 0;
};

/// Gaussian pump envelope, L2-normalized. Throws UnsupportedConfiguration for
/// a monochromatic pump.
double pump_envelope(const PumpConfig& pump, double omega);

/// Frequency offset delta such that k1(w1) - k2(w2) - ks(w1 + delta) +
/// ki(w2 - delta) = 0, by bracketed bisection over |delta| <= 0.15 w2. Returns
/// exactly 0 when signal shares pump 1's curve and idler shares pump 2's.
double phasematching_offset(const ModeCurve& k1, const ModeCurve& k2, const ModeCurve& ks, const ModeCurve& ki,
                            double omega1, double omega2);

/// A SourceConfig with its dispersion resolved: one ModeCurve per distinct
/// mode (shared between waves in that mode), phasematched signal/idler centers,
/// and k' at the four central frequencies.
class SourceModel {
public:
    explicit SourceModel(SourceConfig config);

    [[nodiscard]] const SourceConfig& config() const { return config_; }
    [[nodiscard]] double length() const { return config_.fiber.length; }

    [[nodiscard]] const ModeCurve& curve1() const { return *c1_; }
    [[nodiscard]] const ModeCurve& curve2() const { return *c2_; }
    [[nodiscard]] const ModeCurve& curve_s() const { return *cs_; }
    [[nodiscard]] const ModeCurve& curve_i() const { return *ci_; }

    [[nodiscard]] double omega1() const { return config_.pump1.omega0; }
    [[nodiscard]] double omega2() const { return config_.pump2.omega0; }
    [[nodiscard]] double omega_s() const { return omega_s_; }
    [[nodiscard]] double omega_i() const { return omega_i_; }
    [[nodiscard]] double offset() const { return delta_; }

    [[nodiscard]] double k1p() const { return k1p_; }
    [[nodiscard]] double k2p() const { return k2p_; }
    [[nodiscard]] double ksp() const { return ksp_; }
    [[nodiscard]] double kip() const { return kip_; }

    /// Effective indices at the central frequencies.
    [[nodiscard]] double n1() const;
    [[nodiscard]] double n2() const;

    /// Copy of this model with a different fiber length; dispersion curves are shared.
    [[nodiscard]] SourceModel with_length(double length) const;
    /// Copy with new pump bandwidths (central frequencies unchanged).
    [[nodiscard]] SourceModel with_bandwidths(double sigma1, double sigma2) const;

private:
    SourceModel() = default;
    void resolve();

    SourceConfig config_;
    std::shared_ptr<const ModeCurve> c1_, c2_, cs_, ci_;
    double delta_ = 0, omega_s_ = 0, omega_i_ = 0;
    double k1p_ = 0, k2p_ = 0, ksp_ = 0, kip_ = 0;
};

TemporalParams temporal_params(const SourceModel& model);
inline TemporalParams temporal_params(const SourceConfig& cfg) { return temporal_params(SourceModel(cfg)); }

/// SFWM coefficient gamma, 1/(W m). Zero when the four-field overlap vanishes
/// by symmetry.
double gamma_sfwm(const SourceModel& model);

/// Self-/cross-phase-modulation coefficients entering the nonlinear phase.
struct PhaseModulation {
    double gamma1 = 0, gamma2 = 0;            // SPM
    double gamma21 = 0, gamma12 = 0;          // pump-pump CPM
    double gamma_s1 = 0, gamma_i1 = 0;        // signal/idler CPM from pump 1
    double gamma_s2 = 0, gamma_i2 = 0;        // signal/idler CPM from pump 2
    double peak_power1 = 0, peak_power2 = 0;  // W
};

PhaseModulation phase_modulation(const SourceModel& model);

/// Nonlinear phase mismatch, rad/m. Zero when include_phi_nl is off.
double nonlinear_phase(const SourceModel& model);
/// Same, ignoring the include_phi_nl flag.
double nonlinear_phase_forced(const SourceModel& model);

/// Orientation of the phasematching function from the pump bandwidths, degrees.
double theta_si(const SourceConfig& cfg);
/// General form arctan(-Ts/Ti), degrees.
double theta_si(const TemporalParams& tp);

}  // namespace cpsfwm::source
