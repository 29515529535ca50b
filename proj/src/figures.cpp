#include "cpsfwm/figures.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "cpsfwm/constants.hpp"
#include "cpsfwm/errors.hpp"

namespace cpsfwm::figures {

namespace fs = std::filesystem;
using io::Csv;
using source::SourceConfig;
using source::SourceModel;
using numerics::sinc;

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig2", "fig3", "fig4", "fig5", "fig6", "table1"};
    return ids;
}

dispersion::FiberSpec small_core_fiber(double length) {
    dispersion::FiberSpec f;
    f.core_radius = 1.5e-6;
    f.numerical_aperture = 0.13;
    f.length = length;
    return f;
}

dispersion::FiberSpec few_mode_fiber() {
    dispersion::FiberSpec f;
    f.core_radius = 2e-6;
    f.numerical_aperture = 0.3;
    return f;
}

SourceConfig pulsed_config(double sigma1, double sigma2, double length) {
    auto cfg = source::make_source(small_core_fiber(length), 820e-9, sigma1, 532e-9, sigma2);
    cfg.pump1.avg_power = 0.05;
    cfg.pump2.avg_power = 0.05;
    return cfg;
}

SourceConfig jsa_row_config(char row) {
    switch (row) {
        case 'a': return pulsed_config(0.01e12, 0.03e12, 0.01);
        case 'e': return pulsed_config(0.01e12, 0.01e12, 0.01);
        case 'i': return pulsed_config(0.01e12, 0.0, 0.01);
        default: throw std::invalid_argument(fmt::format("jsa_row_config: unknown row '{}'", row));
    }
}

SourceConfig narrowband_config(double length) {
    return pulsed_config(io::sigma_from_fwhm_wavelength(0.42e-9, 820e-9), 0.0, length);
}

std::vector<double> log_space(double lo, double hi, int n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_space: need n >= 2 and 0 < lo < hi");
    std::vector<double> v(static_cast<std::size_t>(n));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (n - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

PuritySweep purity_sweep(const SourceModel& base, const std::vector<double>& sigma2, int grid) {
    PuritySweep out;
    out.sigma2 = sigma2;
    for (double s2 : sigma2) {
        const auto model = base.with_bandwidths(base.config().pump1.sigma, s2);
        const auto f = jsa::jsa_pulsed_linear(model, jsa::default_grid(model, grid));
        out.purity.push_back(metrics::purity(f).purity);
    }
    return out;
}

Plateau purity_plateau(const SourceModel& base, double level, int grid) {
    const auto sweep = purity_sweep(base, log_space(1e9, 1e13, 41), grid);
    const auto best = std::max_element(sweep.purity.begin(), sweep.purity.end()) - sweep.purity.begin();
    if (sweep.purity[static_cast<std::size_t>(best)] < level)
        throw PhysicsError(fmt::format("no sigma2 reaches purity {} (best {:.4f})", level,
                                       sweep.purity[static_cast<std::size_t>(best)]));
    auto lo = best, hi = best;
    while (lo > 0 && sweep.purity[static_cast<std::size_t>(lo - 1)] >= level) --lo;
    while (hi + 1 < static_cast<long>(sweep.purity.size()) && sweep.purity[static_cast<std::size_t>(hi + 1)] >= level)
        ++hi;
    Plateau p;
    p.lo = sweep.sigma2[static_cast<std::size_t>(lo)];
    p.hi = sweep.sigma2[static_cast<std::size_t>(hi)];
    const double a = std::log(p.lo), b = std::log(p.hi);
    p.marks = {std::exp(a + (b - a) / 6.0), std::exp(0.5 * (a + b)), std::exp(a + 5.0 * (b - a) / 6.0)};
    return p;
}

namespace {

const double fwhm_factor = std::sqrt(2.0 * std::log(2.0));

fs::path emit(FigureResult& res, const fs::path& dir, const std::string& name, const std::string& content) {
    const auto path = dir / name;
    io::atomic_write(path, content);
    res.files.push_back(path);
    return path;
}

// Long-format panel: detunings from the grid centers and one value column.
template <class F>
std::string panel(const jsa::FrequencyGrid& g, const std::string& column, F&& value) {
    Csv csv({"nu_s_rad_s", "nu_i_rad_s", column});
    for (int r = 0; r < g.n_s(); ++r) {
        const double nu_s = g.signal_axis[static_cast<std::size_t>(r)] - g.center_s;
        for (int c = 0; c < g.n_i(); ++c) {
            const double nu_i = g.idler_axis[static_cast<std::size_t>(c)] - g.center_i;
            csv.row({nu_s, nu_i, value(r, c, nu_s, nu_i)});
        }
    }
    return csv.str();
}

std::string intensity_panel(const jsa::JointSpectrum& f) {
    return panel(f.grid, "jsi", [&](int r, int c, double, double) { return std::norm(f.amplitude(r, c)); });
}

void fig2(const fs::path& dir, FigureResult& res) {
    const SourceModel model(pulsed_config(0.01e12, 0.03e12, 0.01));
    const double Lambda = source::temporal_params(model).Lambda;
    res.residuals["lambda"] = Lambda;
    for (double B : {0.01, 0.2, 1.0}) {
        const double xmax = std::max(30.0, 3.0 / B);
        const int n = 1201;
        std::vector<double> xs(n), mag(n);
        double peak = 0.0;
        for (int k = 0; k < n; ++k) {
            xs[k] = -xmax + 2.0 * xmax * k / (n - 1);
            mag[k] = std::abs(jsa::phi_p(xs[k], B, Lambda));
            peak = std::max(peak, mag[k]);
        }
        Csv csv({"x", "phi_abs_normalized", "gaussian_limit", "sinc_limit"});
        for (int k = 0; k < n; ++k)
            csv.row({xs[k], mag[k] / peak, std::exp(-B * B * xs[k] * xs[k]), std::abs(sinc(0.5 * xs[k]))});
        emit(res, dir, fmt::format("fig2_B{}.csv", B), csv.str());
    }
}

void fig3(const fs::path& dir, const FigureOptions& opt, FigureResult& res) {
    for (char row : {'a', 'e', 'i'}) {
        const SourceModel model(jsa_row_config(row));
        const auto tp = source::temporal_params(model);
        const auto grid = jsa::default_grid(model, opt.grid);
        const auto prefix = fmt::format("fig3{}", row);
        jsa::JointSpectrum lin, num;
        if (row == 'i') {
            const double sigma = model.config().pump1.sigma;
            emit(res, dir, prefix + "_alpha.csv", panel(grid, "alpha", [&](int, int, double s, double i) {
                     return std::exp(-(s + i) * (s + i) / (sigma * sigma));
                 }));
            emit(res, dir, prefix + "_phi.csv", panel(grid, "phi_abs", [&](int, int, double s, double i) {
                     return std::abs(sinc(0.5 * (tp.tau1s * s + tp.t1i * i)));
                 }));
            lin = jsa::jsa_mixed_linear(model, grid);
            num = jsa::jsa_mixed(model, grid);
        } else {
            const auto& c = model.config();
            const double total = c.pump1.sigma * c.pump1.sigma + c.pump2.sigma * c.pump2.sigma;
            emit(res, dir, prefix + "_alpha.csv", panel(grid, "alpha", [&](int, int, double s, double i) {
                     return std::exp(-(s + i) * (s + i) / total);
                 }));
            emit(res, dir, prefix + "_phi.csv", panel(grid, "phi_abs", [&](int, int, double s, double i) {
                     return std::abs(jsa::phi_p(tp.Ts * s + tp.Ti * i, tp.B, tp.Lambda));
                 }));
            lin = jsa::jsa_pulsed_linear(model, grid);
            num = jsa::jsa_pulsed_numeric(model, grid, {opt.quad, opt.quad * 256, 1e-6});
            res.residuals[prefix + ".quad_residual"] = num.quad_residual;
            res.residuals[prefix + ".B"] = tp.B;
        }
        emit(res, dir, prefix + "_jsi_linear.csv", intensity_panel(lin));
        emit(res, dir, prefix + "_jsi_numeric.csv", intensity_panel(num));
        res.residuals[prefix + ".overlap_linear_numeric"] = jsa::overlap(lin, num);
    }
}

void fig4(const fs::path& dir, FigureResult& res) {
    struct Panel {
        char id;
        double sigma1, sigma2;
    };
    Csv leff({"panel", "sigma1_rad_s", "sigma2_rad_s", "l_eff_m"});
    for (const Panel& p : {Panel{'a', 1e12, 1e12}, Panel{'b', 1e12, 0.1e12}, Panel{'c', 0.1e12, 1e12}}) {
        const SourceModel base(pulsed_config(p.sigma1, p.sigma2, 0.01));
        const double l_eff = metrics::effective_length(base);
        leff.row(std::string(1, p.id), {p.sigma1, p.sigma2, l_eff});
        Csv csv({"length_m", "n_numeric_1_s", "n_closed_1_s", "residual"});
        for (double L : log_space(0.05 * l_eff, 20.0 * l_eff, 15)) {
            const auto m = base.with_length(L);
            const auto num = metrics::brightness_pulsed_numeric(m);
            const auto cl = metrics::brightness_pulsed_closed(m);
            csv.row({L, num.pairs_per_second, cl.pairs_per_second, num.residual});
            res.residuals[fmt::format("fig4{}.max_residual", p.id)] =
                std::max(res.residuals[fmt::format("fig4{}.max_residual", p.id)], num.residual);
        }
        emit(res, dir, fmt::format("fig4{}.csv", p.id), csv.str());
    }
    emit(res, dir, "fig4_leff.csv", leff.str());

    const SourceModel mixed(pulsed_config(1e12, 0.0, 0.01));
    Csv csv({"length_m", "n_numeric_1_s", "n_closed_1_s", "residual"});
    const double th = metrics::factorability_threshold_mixed(mixed);
    for (double L : log_space(th, 100.0 * th, 9)) {
        const auto m = mixed.with_length(L);
        const auto num = metrics::brightness_mixed_numeric(m);
        csv.row({L, num.pairs_per_second, metrics::brightness_mixed_closed(m).pairs_per_second, num.residual});
        res.residuals["fig4d.max_residual"] = std::max(res.residuals["fig4d.max_residual"], num.residual);
    }
    emit(res, dir, "fig4d.csv", csv.str());
}

void fig5(const fs::path& dir, const FigureOptions& opt, FigureResult& res) {
    const std::vector<double> lengths{0.001, 0.01, 0.1, 1.0};
    const auto sigma2 = log_space(1e9, 1e13, 41);
    const int sweep_grid = std::min(opt.grid, 129);
    Csv markers({"sigma1_rad_s", "length_m", "purity", "n_closed_1_s"});
    for (const auto& [tag, sigma1] : {std::pair{"s1_0.01THz", 0.01e12}, std::pair{"s1_1THz", 1e12}}) {
        Csv purity({"sigma2_rad_s", "purity_L0.001m", "purity_L0.01m", "purity_L0.1m", "purity_L1m"});
        Csv rate({"sigma2_rad_s", "n_closed_L0.001m_1_s", "n_closed_L0.01m_1_s", "n_closed_L0.1m_1_s",
                  "n_closed_L1m_1_s"});
        std::vector<PuritySweep> sweeps;
        std::vector<std::vector<double>> rates;
        for (double L : lengths) {
            const SourceModel base(pulsed_config(sigma1, sigma1, L));
            sweeps.push_back(purity_sweep(base, sigma2, sweep_grid));
            std::vector<double> r;
            for (double s2 : sigma2)
                r.push_back(metrics::brightness_pulsed_closed(base.with_bandwidths(sigma1, s2)).pairs_per_second);
            rates.push_back(std::move(r));
            const SourceModel mixed(pulsed_config(sigma1, 0.0, L));
            const auto f = jsa::jsa_mixed(mixed, jsa::default_grid(mixed, sweep_grid));
            markers.row({sigma1, L, metrics::purity(f).purity,
                         metrics::brightness_mixed_closed(mixed).pairs_per_second});
        }
        for (std::size_t k = 0; k < sigma2.size(); ++k) {
            purity.row({sigma2[k], sweeps[0].purity[k], sweeps[1].purity[k], sweeps[2].purity[k], sweeps[3].purity[k]});
            rate.row({sigma2[k], rates[0][k], rates[1][k], rates[2][k], rates[3][k]});
        }
        emit(res, dir, fmt::format("fig5_purity_{}.csv", tag), purity.str());
        emit(res, dir, fmt::format("fig5_rate_{}.csv", tag), rate.str());
    }
    emit(res, dir, "fig5_mixed_markers.csv", markers.str());

    const SourceModel base(pulsed_config(1e12, 1e12, 0.01));
    const auto plateau = purity_plateau(base, 0.99, sweep_grid);
    Csv marks({"panel", "sigma2_rad_s", "purity_numeric", "purity_linear"});
    const char* names[] = {"e", "f", "g"};
    for (int k = 0; k < 3; ++k) {
        const auto model = base.with_bandwidths(1e12, plateau.marks[static_cast<std::size_t>(k)]);
        const auto grid = jsa::default_grid(model, opt.grid);
        const auto num = jsa::jsa_pulsed_numeric(model, grid, {opt.quad, opt.quad * 256, 1e-6});
        const auto lin = jsa::jsa_pulsed_linear(model, grid);
        const double p_num = metrics::purity(num).purity;
        marks.row(names[k], {plateau.marks[static_cast<std::size_t>(k)], p_num, metrics::purity(lin).purity});
        emit(res, dir, fmt::format("fig5{}_jsi.csv", names[k]), intensity_panel(num));
        res.residuals[fmt::format("fig5{}.quad_residual", names[k])] = num.quad_residual;
    }
    emit(res, dir, "fig5_marks.csv", marks.str());
}

void fig6(const fs::path& dir, const FigureOptions& opt, FigureResult& res) {
    const SourceModel base(narrowband_config(1.0));
    Csv csv({"length_m", "idler_fwhm_numeric_rad_s", "idler_fwhm_closed_rad_s", "signal_fwhm_numeric_rad_s",
             "purity"});
    for (double L : log_space(1e-4, 100.0, 25)) {
        const auto m = base.with_length(L);
        const auto f = jsa::jsa_mixed(m, jsa::default_grid(m, opt.grid));
        csv.row({L, metrics::marginal_fwhm(f, metrics::Axis::idler), metrics::idler_bandwidth(m) * fwhm_factor,
                 metrics::marginal_fwhm(f, metrics::Axis::signal), metrics::purity(f).purity});
    }
    emit(res, dir, "fig6.csv", csv.str());
    Csv th({"threshold_length_m", "pump_sigma_rad_s", "pump_fwhm_rad_s"});
    const double sigma = base.config().pump1.sigma;
    th.row({metrics::factorability_threshold_mixed(base), sigma, sigma * fwhm_factor});
    emit(res, dir, "fig6_threshold.csv", th.str());
}

void table1(const fs::path& dir, FigureResult& res) {
    Csv csv({"mode", "lambda_s_nm", "lambda_i_nm", "dlambda_s_nm", "dlambda_i_nm", "delta_rad_s"});
    for (auto mode : {dispersion::ModeId{1, 1}, dispersion::ModeId{2, 1}, dispersion::ModeId{0, 2}}) {
        const auto r = metrics::intermodal_offsets(few_mode_fiber(), 820e-9, 532e-9, mode);
        csv.row(mode.name(), {r.lambda_s * 1e9, r.lambda_i * 1e9, r.dlambda_s * 1e9, r.dlambda_i * 1e9, r.delta});
    }
    emit(res, dir, "table1.csv", csv.str());
}

}  // namespace

FigureResult generate(const std::string& id, const fs::path& dir, const FigureOptions& opt) {
    FigureResult res;
    if (id == "fig2") fig2(dir, res);
    else if (id == "fig3") fig3(dir, opt, res);
    else if (id == "fig4") fig4(dir, res);
    else if (id == "fig5") fig5(dir, opt, res);
    else if (id == "fig6") fig6(dir, opt, res);
    else if (id == "table1") table1(dir, res);
    else throw ConfigError(fmt::format("unknown figure id '{}' (expected fig2..fig6 or table1)", id));
    return res;
}

}  // namespace cpsfwm::figures
