#pragma once

// Weakly-guiding step-index fiber: silica material dispersion, LP-mode
// propagation constants, group slowness and transverse mode overlaps.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cpsfwm/numerics.hpp"

namespace cpsfwm::dispersion {

/// Three-term Sellmeier model n^2 = 1 + sum B_j L^2 / (L^2 - C_j^2), with L in
/// micrometres. The defaults are Malitson's fused-silica coefficients.
struct SellmeierModel {
    std::array<double, 3> b{0.6961663, 0.4079426, 0.8974794};
    std::array<double, 3> c_um{0.0684043, 0.1162414, 9.896161};
    double min_wavelength_um = 0.21;
    double max_wavelength_um = 3.7;

    static SellmeierModel fused_silica() { return {}; }
    auto operator<=>(const SellmeierModel&) const = default;
};

/// Refractive index at a vacuum wavelength given in metres. Throws
/// PhysicsError outside the model's validity range.
double sellmeier_index(double wavelength_m, const SellmeierModel& model = SellmeierModel::fused_silica());

struct ModeId {
    int l = 0;  // azimuthal order
    int m = 1;  // radial order

    static constexpr ModeId lp01() { return {0, 1}; }
    [[nodiscard]] std::string name() const;
    auto operator<=>(const ModeId&) const = default;
};

/// Parses "LP01", "lp11", "LP21" ... Throws std::invalid_argument.
ModeId parse_mode(const std::string& text);

struct FiberSpec {
    double core_radius = 1.5e-6;       // m
    double numerical_aperture = 0.13;
    double length = 0.01;              // m
    SellmeierModel cladding{};

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
    auto operator<=>(const FiberSpec&) const = default;
};

struct DispersionSample {
    double omega = 0.0;    // rad/s
    double k = 0.0;        // rad/m
    double k_prime = 0.0;  // s/m
    double n_eff = 0.0;
};

struct GuidedMode {
    ModeId mode;
    double b = 0.0;  // normalized propagation constant in (0, 1)
};

double cladding_index(const FiberSpec& fiber, double wavelength_m);
/// Core index chosen so that NA = sqrt(n_core^2 - n_clad^2) at every wavelength.
double core_index(const FiberSpec& fiber, double wavelength_m);

double v_number(const FiberSpec& fiber, double wavelength_m);

/// Relative mismatch of u J_{l-1}(u) K_l(w) + w K_{l-1}(w) J_l(u) = 0 at b.
double characteristic_residual(int l, double v, double b);

/// All guided LP modes, sorted by decreasing b.
std::vector<GuidedMode> solve_lp_modes(const FiberSpec& fiber, double wavelength_m);

/// Normalized propagation constant of one mode; throws ModeNotGuided.
double normalized_b(const FiberSpec& fiber, ModeId mode, double wavelength_m);

/// Normalized frequency below which the mode is not guided (0 for LP01).
double cutoff_v(ModeId mode);
/// Longest wavelength at which the mode is guided (infinity for LP01).
double cutoff_wavelength(const FiberSpec& fiber, ModeId mode);

double propagation_constant(const FiberSpec& fiber, ModeId mode, double omega);

/// dk/domega by central differences (relative step 1e-6) with two levels of
/// Richardson extrapolation. Throws ConvergenceError if the two extrapolated
/// levels disagree by more than 1e-8 relative.
double group_slowness(const FiberSpec& fiber, ModeId mode, double omega);

DispersionSample sample(const FiberSpec& fiber, ModeId mode, double omega);

/// Transverse field of an LP mode, cos(l phi) orientation, normalized so the
/// integral of |f|^2 over the plane is 1 (units 1/m).
class ModeProfile {
public:
    ModeProfile(const FiberSpec& fiber, ModeId mode, double wavelength_m);

    [[nodiscard]] double operator()(double x, double y) const;
    /// Radial factor R(r) / norm; the full field is radial(r) * cos(l phi).
    [[nodiscard]] double radial(double r) const;
    [[nodiscard]] ModeId mode() const { return mode_; }
    [[nodiscard]] double u() const { return u_; }
    [[nodiscard]] double w() const { return w_; }
    [[nodiscard]] double core_radius() const { return a_; }

private:
    [[nodiscard]] double raw_radial(double r) const;

    ModeId mode_;
    double a_;
    double u_;
    double w_;
    double scale_ = 1.0;
};

/// Integral of f1 f2 f3* f4* over the fiber cross-section (1/m^2).
double overlap_four(const FiberSpec& fiber, const std::array<ModeId, 4>& modes,
                    const std::array<double, 4>& wavelengths_m);
/// Integral of |fa|^2 |fb|^2; symmetric in its two modes.
double overlap_two(const FiberSpec& fiber, ModeId mode_a, ModeId mode_b, double wavelength_a_m,
                   double wavelength_b_m);
/// Integral of |f|^4.
double overlap_self(const FiberSpec& fiber, ModeId mode, double wavelength_m);

/// k(omega) of one mode, memoized as Chebyshev patches on a fixed partition of
/// the frequency axis. The value returned for a given omega depends only on
/// omega, so waves sharing a ModeCurve see bit-identical propagation
/// constants. Concurrent readers are safe; patch insertion takes a unique lock.
class ModeCurve {
public:
    ModeCurve(FiberSpec fiber, ModeId mode);

    [[nodiscard]] double k(double omega) const;
    [[nodiscard]] double k_prime(double omega) const;
    [[nodiscard]] double n_eff(double omega) const;
    [[nodiscard]] ModeId mode() const { return mode_; }
    [[nodiscard]] const FiberSpec& fiber() const { return fiber_; }

    static constexpr double patch_width = 4.398046511104e12;  // 2^42 rad/s
    static constexpr int patch_degree = 16;

private:
    struct Patch {
        bool direct = false;  // mode cutoff inside the patch: evaluate exactly
        numerics::ChebyshevSeries series;
    };
    const Patch& patch_for(double omega) const;

    FiberSpec fiber_;
    ModeId mode_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::int64_t, std::unique_ptr<Patch>> patches_;
};

}  // namespace cpsfwm::dispersion
