#include "cpsfwm/dispersion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "cpsfwm/constants.hpp"
#include "cpsfwm/errors.hpp"

namespace cpsfwm::dispersion {

using constants::pi;
using constants::speed_of_light;

namespace {

constexpr int bracket_count = 2000;
constexpr double b_floor = 1e-6;
constexpr double b_ceiling = 1.0 - 1e-6;

struct CharacteristicTerms {
    double core;
    double cladding;
};

// u J_{l-1}(u) K_l(w) and w K_{l-1}(w) J_l(u), with J_{-1} = -J_1, K_{-1} = K_1.
CharacteristicTerms characteristic_terms(int l, double v, double b) {
    const double u = v * std::sqrt(1.0 - b);
    const double w = v * std::sqrt(b);
    const double j_prev = (l == 0) ? -std::cyl_bessel_j(1.0, u) : std::cyl_bessel_j(l - 1.0, u);
    const double k_prev = (l == 0) ? std::cyl_bessel_k(1.0, w) : std::cyl_bessel_k(l - 1.0, w);
    return {u * j_prev * std::cyl_bessel_k(static_cast<double>(l), w),
            w * k_prev * std::cyl_bessel_j(static_cast<double>(l), u)};
}

double characteristic(int l, double v, double b) {
    const auto t = characteristic_terms(l, v, b);
    return t.core + t.cladding;
}

double bisect_root(int l, double v, double lo, double hi) {
    double flo = characteristic(l, v, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = characteristic(l, v, mid);
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

// Roots of the LP_l characteristic equation, scanning b downward so the m-th
// root found is LP_lm. Stops after max_roots roots.
std::vector<double> lp_roots(int l, double v, int max_roots) {
    std::vector<double> roots;
    const double step = (b_ceiling - b_floor) / bracket_count;
    double b_hi = b_ceiling;
    double f_hi = characteristic(l, v, b_hi);
    for (int j = 1; j <= bracket_count; ++j) {
        const double b_lo = b_ceiling - j * step;
        const double f_lo = characteristic(l, v, b_lo);
        if (f_lo == 0.0) {
            roots.push_back(b_lo);
        } else if ((f_lo < 0.0) != (f_hi < 0.0) && f_hi != 0.0) {
            roots.push_back(bisect_root(l, v, b_lo, b_hi));
        }
        if (static_cast<int>(roots.size()) >= max_roots) break;
        b_hi = b_lo;
        f_hi = f_lo;
    }
    return roots;
}

double wavelength_um(double wavelength_m) { return wavelength_m * 1e6; }

// Zeros of J_l for the low orders the mode solver needs on every call.
double j_zero(int l, int m) {
    constexpr int max_l = 8;
    constexpr int max_m = 8;
    static const auto table = [] {
        std::array<std::array<double, max_m>, max_l> t{};
        for (int i = 0; i < max_l; ++i)
            for (int j = 0; j < max_m; ++j)
                t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = numerics::bessel_j_zero(i, j + 1);
        return t;
    }();
    if (l < max_l && m >= 1 && m <= max_m) return table[static_cast<std::size_t>(l)][static_cast<std::size_t>(m - 1)];
    return numerics::bessel_j_zero(l, m);
}

}  // namespace

double sellmeier_index(double wavelength_m, const SellmeierModel& model) {
    const double lum = wavelength_um(wavelength_m);
    if (!(lum >= model.min_wavelength_um && lum <= model.max_wavelength_um)) {
        std::ostringstream msg;
        msg << "wavelength " << lum << " um outside Sellmeier validity [" << model.min_wavelength_um << ", "
            << model.max_wavelength_um << "] um";
        throw PhysicsError(msg.str());
    }
    const double l2 = lum * lum;
    double n2 = 1.0;
    for (std::size_t j = 0; j < 3; ++j) n2 += model.b[j] * l2 / (l2 - model.c_um[j] * model.c_um[j]);
    return std::sqrt(n2);
}

std::string ModeId::name() const {
    std::ostringstream s;
    s << "LP" << l << m;
    return s.str();
}

ModeId parse_mode(const std::string& text) {
    std::string t;
    for (char c : text) t.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (t.size() < 4 || t.rfind("LP", 0) != 0) throw std::invalid_argument("mode must look like LP01, got '" + text + "'");
    const std::string digits = t.substr(2);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw std::invalid_argument("mode must look like LP01, got '" + text + "'");
    }
    // Two digits: LPlm. More digits are ambiguous without a separator.
    if (digits.size() != 2) throw std::invalid_argument("mode label needs exactly two digits: '" + text + "'");
    ModeId id{digits[0] - '0', digits[1] - '0'};
    if (id.m < 1) throw std::invalid_argument("radial order must be >= 1: '" + text + "'");
    return id;
}

void FiberSpec::validate() const {
    if (!(core_radius > 0.0)) throw ConfigError("fiber core_radius must be > 0");
    if (!(numerical_aperture > 0.0 && numerical_aperture < 1.0)) {
        throw ConfigError("fiber numerical_aperture must be in (0, 1)");
    }
    if (!(length > 0.0)) throw ConfigError("fiber length must be > 0");
    if (!(cladding.min_wavelength_um < cladding.max_wavelength_um)) throw ConfigError("Sellmeier validity range is empty");
}

double cladding_index(const FiberSpec& fiber, double wavelength_m) {
    return sellmeier_index(wavelength_m, fiber.cladding);
}

double core_index(const FiberSpec& fiber, double wavelength_m) {
    const double n = cladding_index(fiber, wavelength_m);
    return std::sqrt(n * n + fiber.numerical_aperture * fiber.numerical_aperture);
}

double v_number(const FiberSpec& fiber, double wavelength_m) {
    sellmeier_index(wavelength_m, fiber.cladding);  // validity check
    return 2.0 * pi * fiber.core_radius * fiber.numerical_aperture / wavelength_m;
}

double characteristic_residual(int l, double v, double b) {
    const auto t = characteristic_terms(l, v, b);
    const double scale = std::abs(t.core) + std::abs(t.cladding);
    return scale > 0.0 ? std::abs(t.core + t.cladding) / scale : 0.0;
}

std::vector<GuidedMode> solve_lp_modes(const FiberSpec& fiber, double wavelength_m) {
    const double v = v_number(fiber, wavelength_m);
    std::vector<GuidedMode> modes;
    for (int l = 0;; ++l) {
        const auto roots = lp_roots(l, v, std::numeric_limits<int>::max());
        if (roots.empty()) break;
        for (std::size_t i = 0; i < roots.size(); ++i) modes.push_back({{l, static_cast<int>(i) + 1}, roots[i]});
    }
    std::stable_sort(modes.begin(), modes.end(), [](const GuidedMode& a, const GuidedMode& b) { return a.b > b.b; });
    return modes;
}

double cutoff_v(ModeId mode) {
    if (mode.l == 0) return mode.m == 1 ? 0.0 : j_zero(1, mode.m - 1);
    return j_zero(mode.l - 1, mode.m);
}

double cutoff_wavelength(const FiberSpec& fiber, ModeId mode) {
    const double vc = cutoff_v(mode);
    if (vc == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * pi * fiber.core_radius * fiber.numerical_aperture / vc;
}

double normalized_b(const FiberSpec& fiber, ModeId mode, double wavelength_m) {
    const double v = v_number(fiber, wavelength_m);
    // The LP_lm root has u between consecutive zeros of J_{l-1} and J_l:
    // j_{l-1,m} < u < j_{l,m} (for l = 0, j_{1,m-1} < u < j_{0,m} with j_{1,0} = 0).
    const double u_lo = cutoff_v(mode);
    const double u_hi = j_zero(mode.l, mode.m);
    const double b_hi = std::min(b_ceiling, 1.0 - (u_lo / v) * (u_lo / v));
    const double b_lo = std::max(b_floor, 1.0 - (u_hi / v) * (u_hi / v));
    const bool bracketed = v > u_lo && b_lo < b_hi &&
                           (characteristic(mode.l, v, b_lo) < 0.0) != (characteristic(mode.l, v, b_hi) < 0.0);
    if (!bracketed) {
        std::ostringstream msg;
        msg << mode.name() << " is not guided at " << wavelength_m * 1e9 << " nm (V = " << v
            << ", cutoff V = " << cutoff_v(mode) << ", cutoff wavelength " << cutoff_wavelength(fiber, mode) * 1e9
            << " nm)";
        throw ModeNotGuided(msg.str());
    }
    return bisect_root(mode.l, v, b_lo, b_hi);
}

double propagation_constant(const FiberSpec& fiber, ModeId mode, double omega) {
    const double wavelength = constants::wavelength_from_omega(omega);
    const double b = normalized_b(fiber, mode, wavelength);
    const double n_clad = cladding_index(fiber, wavelength);
    const double na = fiber.numerical_aperture;
    return omega / speed_of_light * std::sqrt(n_clad * n_clad + b * na * na);
}

double group_slowness(const FiberSpec& fiber, ModeId mode, double omega) {
    const double h = 1e-6 * omega;
    auto diff = [&](double step) {
        return (propagation_constant(fiber, mode, omega + step) - propagation_constant(fiber, mode, omega - step)) /
               (2.0 * step);
    };
    const double d1 = diff(h);
    const double d2 = diff(h / 2.0);
    const double d4 = diff(h / 4.0);
    const double r1 = (4.0 * d2 - d1) / 3.0;
    const double r2 = (4.0 * d4 - d2) / 3.0;
    const double rel = std::abs(r1 - r2) / std::abs(r2);
    if (!(rel <= 1e-8)) {
        throw ConvergenceError("group_slowness: Richardson levels disagree for " + mode.name(), rel);
    }
    return r2;
}

DispersionSample sample(const FiberSpec& fiber, ModeId mode, double omega) {
    DispersionSample s;
    s.omega = omega;
    s.k = propagation_constant(fiber, mode, omega);
    s.k_prime = group_slowness(fiber, mode, omega);
    s.n_eff = s.k * speed_of_light / omega;
    return s;
}

// ---------------------------------------------------------------------------
// Mode profiles and overlaps

ModeProfile::ModeProfile(const FiberSpec& fiber, ModeId mode, double wavelength_m)
    : mode_(mode), a_(fiber.core_radius) {
    const double v = v_number(fiber, wavelength_m);
    const double b = normalized_b(fiber, mode, wavelength_m);
    u_ = v * std::sqrt(1.0 - b);
    w_ = v * std::sqrt(b);

    const double angular = mode.l == 0 ? 2.0 * pi : pi;
    const auto rule = [&] {
        // Same composite rule as the overlaps use; see radial_rule below.
        std::vector<std::pair<double, double>> pts;
        const auto core = numerics::gauss_legendre(32, 0.0, a_);
        for (std::size_t k = 0; k < core.size(); ++k) pts.emplace_back(core.nodes[k], core.weights[k]);
        const double panel = a_ / w_;
        for (int p = 0; p < 80; ++p) {
            const auto g = numerics::gauss_legendre(16, a_ + p * panel, a_ + (p + 1) * panel);
            for (std::size_t k = 0; k < g.size(); ++k) pts.emplace_back(g.nodes[k], g.weights[k]);
        }
        return pts;
    }();
    double norm = 0.0;
    for (const auto& [r, wt] : rule) {
        const double f = raw_radial(r);
        norm += wt * r * f * f;
    }
    scale_ = 1.0 / std::sqrt(angular * norm);
}

double ModeProfile::raw_radial(double r) const {
    if (r <= a_) return std::cyl_bessel_j(static_cast<double>(mode_.l), u_ * r / a_) / std::cyl_bessel_j(static_cast<double>(mode_.l), u_);
    return std::cyl_bessel_k(static_cast<double>(mode_.l), w_ * r / a_) / std::cyl_bessel_k(static_cast<double>(mode_.l), w_);
}

double ModeProfile::radial(double r) const { return scale_ * raw_radial(r); }

double ModeProfile::operator()(double x, double y) const {
    const double r = std::hypot(x, y);
    const double phi = std::atan2(y, x);
    return radial(r) * std::cos(mode_.l * phi);
}

namespace {

// Integral over [0, 2pi) of prod cos(l_i phi), via the expansion of the product
// into cos(sum s_i l_i phi) / 2^4.
double angular_product(const std::array<int, 4>& l) {
    int count = 0;
    for (int s = 0; s < 16; ++s) {
        int total = 0;
        for (int i = 0; i < 4; ++i) total += ((s >> i) & 1) ? -l[static_cast<std::size_t>(i)] : l[static_cast<std::size_t>(i)];
        if (total == 0) ++count;
    }
    return 2.0 * pi * count / 16.0;
}

double radial_product(const std::array<ModeProfile, 4>& p) {
    double w_min = p[0].w();
    for (const auto& q : p) w_min = std::min(w_min, q.w());
    const double a = p[0].core_radius();
    double acc = 0.0;
    auto add = [&](double lo, double hi, int n) {
        const auto g = numerics::gauss_legendre(n, lo, hi);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double r = g.nodes[k];
            acc += g.weights[k] * r * p[0].radial(r) * p[1].radial(r) * p[2].radial(r) * p[3].radial(r);
        }
    };
    add(0.0, a, 32);
    // The fourfold product decays at least as exp(-4 w_min (r - a) / a).
    const double panel = a / w_min;
    for (int k = 0; k < 40; ++k) add(a + k * panel, a + (k + 1) * panel, 16);
    return acc;
}

}  // namespace

double overlap_four(const FiberSpec& fiber, const std::array<ModeId, 4>& modes,
                    const std::array<double, 4>& wavelengths_m) {
    const std::array<ModeProfile, 4> p{ModeProfile(fiber, modes[0], wavelengths_m[0]),
                                       ModeProfile(fiber, modes[1], wavelengths_m[1]),
                                       ModeProfile(fiber, modes[2], wavelengths_m[2]),
                                       ModeProfile(fiber, modes[3], wavelengths_m[3])};
    const double ang = angular_product({modes[0].l, modes[1].l, modes[2].l, modes[3].l});
    if (ang == 0.0) return 0.0;
    return ang * radial_product(p);
}

double overlap_two(const FiberSpec& fiber, ModeId mode_a, ModeId mode_b, double wavelength_a_m,
                   double wavelength_b_m) {
    // Canonical argument order makes the result exactly symmetric.
    if (std::tie(mode_b, wavelength_b_m) < std::tie(mode_a, wavelength_a_m)) {
        std::swap(mode_a, mode_b);
        std::swap(wavelength_a_m, wavelength_b_m);
    }
    return overlap_four(fiber, {mode_a, mode_a, mode_b, mode_b},
                        {wavelength_a_m, wavelength_a_m, wavelength_b_m, wavelength_b_m});
}

double overlap_self(const FiberSpec& fiber, ModeId mode, double wavelength_m) {
    return overlap_two(fiber, mode, mode, wavelength_m, wavelength_m);
}

// ---------------------------------------------------------------------------
// ModeCurve

ModeCurve::ModeCurve(FiberSpec fiber, ModeId mode) : fiber_(std::move(fiber)), mode_(mode) {}

const ModeCurve::Patch& ModeCurve::patch_for(double omega) const {
    const auto index = static_cast<std::int64_t>(std::floor(omega / patch_width));
    {
        std::shared_lock lock(mutex_);
        const auto it = patches_.find(index);
        if (it != patches_.end()) return *it->second;
    }
    auto patch = std::make_unique<Patch>();
    const double lo = static_cast<double>(index) * patch_width;
    const double hi = lo + patch_width;
    try {
        patch->series = numerics::ChebyshevSeries::fit(
            [&](double w) { return propagation_constant(fiber_, mode_, w); }, lo, hi, patch_degree);
    } catch (const PhysicsError&) {
        patch->direct = true;
    }
    std::unique_lock lock(mutex_);
    const auto [it, inserted] = patches_.emplace(index, std::move(patch));
    return *it->second;
}

double ModeCurve::k(double omega) const {
    const Patch& p = patch_for(omega);
    return p.direct ? propagation_constant(fiber_, mode_, omega) : p.series(omega);
}

double ModeCurve::k_prime(double omega) const {
    const Patch& p = patch_for(omega);
    return p.direct ? group_slowness(fiber_, mode_, omega) : p.series.derivative(omega);
}

double ModeCurve::n_eff(double omega) const { return k(omega) * speed_of_light / omega; }

}  // namespace cpsfwm::dispersion
