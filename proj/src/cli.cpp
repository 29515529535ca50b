#include "cpsfwm/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "cpsfwm/constants.hpp"
#include "cpsfwm/errors.hpp"
#include "cpsfwm/figures.hpp"
#include "cpsfwm/io.hpp"
#include "cpsfwm/metrics.hpp"

namespace cpsfwm::cli {

namespace fs = std::filesystem;
using namespace constants;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir;
    std::optional<int> grid;
    std::optional<int> quad;
    std::optional<std::uint64_t> seed;  // accepted, unused
    std::string format = "csv";
};

struct Context {
    io::RunConfig cfg;
    fs::path dir;
    io::Manifest manifest;
    std::ostream& out;

    void write(const std::string& name, const std::string& content) {
        const auto path = dir / name;
        io::atomic_write(path, content);
        manifest.add(path);
        out << path.string() << '\n';
    }
    void write_table(const std::string& stem, const io::Csv& table, const std::string& format) {
        if (format == "json") write(stem + ".json", table.json());
        else write(stem + ".csv", table.str());
    }
    void finish() { io::write_manifest(dir, manifest); }
};

Context make_context(const Common& c, const std::string& command, std::ostream& out) {
    io::RunConfig cfg = c.config_path.empty() ? io::default_config() : io::load_config(c.config_path);
    if (c.grid) {
        if (*c.grid < 3 || *c.grid % 2 == 0) throw ConfigError("--grid must be an odd number >= 3");
        cfg.grid = *c.grid;
    }
    if (c.quad) {
        if (*c.quad < 2) throw ConfigError("--quad must be >= 2");
        cfg.quad = *c.quad;
    }
    fs::path dir = c.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv(out_dir_env);
        dir = env && *env ? fs::path(env) : fs::path(".");
    }
    fs::create_directories(dir);
    Context ctx{cfg, dir, {}, out};
    ctx.manifest.command = command;
    ctx.manifest.config_hash = io::hash_hex(io::config_hash(cfg));
    return ctx;
}

jsa::QuadOptions quad_options(const io::RunConfig& cfg) { return {cfg.quad, cfg.quad * 256, 1e-6}; }

jsa::JointSpectrum compute_jsa(const source::SourceModel& model, const io::RunConfig& cfg, const std::string& method) {
    const auto grid = jsa::default_grid(model, cfg.grid);
    if (model.config().mixed())
        return method == "linear" ? jsa::jsa_mixed_linear(model, grid) : jsa::jsa_mixed(model, grid);
    return method == "linear" ? jsa::jsa_pulsed_linear(model, grid)
                              : jsa::jsa_pulsed_numeric(model, grid, quad_options(cfg));
}

std::vector<double> sweep_lengths(const io::RunConfig& cfg, const source::SourceModel& model) {
    if (!cfg.lengths_m.empty()) return cfg.lengths_m;
    if (model.config().mixed()) {
        const double th = metrics::factorability_threshold_mixed(model);
        return figures::log_space(th, 1e5 * th, 11);
    }
    const double l_eff = metrics::effective_length(model);
    return figures::log_space(0.05 * l_eff, 20.0 * l_eff, 15);
}

void cmd_dispersion(Context& ctx, const std::string& format) {
    const auto& cfg = ctx.cfg;
    const auto& fiber = cfg.source.fiber;
    io::Csv table({"wavelength_m", "omega_rad_s", "n_eff", "k_rad_m", "k_prime_s_m"});
    for (int j = 0; j < cfg.samples; ++j) {
        const double lambda = cfg.lambda_min_m + (cfg.lambda_max_m - cfg.lambda_min_m) * j / (cfg.samples - 1);
        const auto s = dispersion::sample(fiber, cfg.dispersion_mode, omega_from_wavelength(lambda));
        table.row({lambda, s.omega, s.n_eff, s.k, s.k_prime});
    }
    ctx.write_table("dispersion", table, format);
}

void cmd_jsa(Context& ctx, const std::string& format) {
    const source::SourceModel model(ctx.cfg.source);
    const auto f = compute_jsa(model, ctx.cfg, ctx.cfg.method);
    if (format == "json") {
        std::ostringstream s;
        jsa::write_json(s, f);
        ctx.write("jsa.json", s.str());
    } else {
        std::ostringstream s;
        jsa::write_csv(s, f);
        ctx.write("jsa.csv", s.str());
        nlohmann::ordered_json meta;
        meta["method"] = f.method;
        meta["normalized"] = f.normalized;
        meta["raw_mass"] = f.raw_mass;
        meta["quad_nodes"] = f.quad_nodes;
        meta["quad_residual"] = f.quad_residual;
        meta["n_s"] = f.grid.n_s();
        meta["n_i"] = f.grid.n_i();
        meta["center_s_rad_s"] = f.grid.center_s;
        meta["center_i_rad_s"] = f.grid.center_i;
        meta["half_span_s_rad_s"] = f.grid.half_span_s;
        meta["half_span_i_rad_s"] = f.grid.half_span_i;
        ctx.write("jsa_meta.json", meta.dump(2) + "\n");
    }
    ctx.manifest.residuals["quad_residual"] = f.quad_residual;
}

void cmd_purity(Context& ctx) {
    const source::SourceModel model(ctx.cfg.source);
    const auto f = compute_jsa(model, ctx.cfg, ctx.cfg.method);
    const auto r = metrics::purity(f);
    // Grid-doubling check: same spans, twice the resolution.
    const auto fine = model.config().mixed() || ctx.cfg.method == "linear"
                          ? compute_jsa(model, [&] {
                                auto c = ctx.cfg;
                                c.grid = 2 * c.grid - 1;
                                return c;
                            }(), ctx.cfg.method)
                          : jsa::jsa_pulsed_numeric(model, f.grid.refined(2), quad_options(ctx.cfg));
    const double refined = metrics::purity(fine).purity;
    nlohmann::ordered_json j;
    j["method"] = f.method;
    j["schmidt_number"] = r.schmidt_number;
    j["purity"] = r.purity;
    j["purity_refined_grid"] = refined;
    j["grid_change"] = std::abs(refined - r.purity);
    std::vector<double> sv(r.singular_values.begin(),
                           r.singular_values.begin() + std::min<std::size_t>(r.singular_values.size(), 20));
    j["singular_values"] = sv;
    j["config_hash"] = ctx.manifest.config_hash;
    ctx.write("purity.json", j.dump(2) + "\n");
    ctx.manifest.residuals["purity_grid_change"] = std::abs(refined - r.purity);
    ctx.manifest.residuals["quad_residual"] = f.quad_residual;
}

void cmd_brightness(Context& ctx, const std::string& format) {
    const source::SourceModel base(ctx.cfg.source);
    const bool mixed = base.config().mixed();
    io::Csv table({"length_m", "n_numeric_1_s", "n_closed_1_s", "residual"});
    double worst = 0.0;
    for (double L : sweep_lengths(ctx.cfg, base)) {
        const auto m = base.with_length(L);
        const auto num = mixed ? metrics::brightness_mixed_numeric(m) : metrics::brightness_pulsed_numeric(m);
        const auto cl = mixed ? metrics::brightness_mixed_closed(m) : metrics::brightness_pulsed_closed(m);
        table.row({L, num.pairs_per_second, cl.pairs_per_second, num.residual});
        worst = std::max(worst, num.residual);
    }
    ctx.write_table("brightness", table, format);
    ctx.manifest.residuals["brightness_max_residual"] = worst;
}

void cmd_bandwidth(Context& ctx, const std::string& format) {
    const source::SourceModel base(ctx.cfg.source);
    if (!base.config().mixed())
        throw UnsupportedConfiguration("bandwidth: the idler bandwidth sweep needs a monochromatic pump 2");
    const double factor = std::sqrt(2.0 * std::log(2.0));
    io::Csv table({"length_m", "fwhm_numeric_rad_s", "fwhm_closed_rad_s"});
    for (double L : sweep_lengths(ctx.cfg, base)) {
        const auto m = base.with_length(L);
        const auto f = jsa::jsa_mixed(m, jsa::default_grid(m, ctx.cfg.grid));
        table.row({L, metrics::marginal_fwhm(f, metrics::Axis::idler), metrics::idler_bandwidth(m) * factor});
    }
    ctx.write_table("bandwidth", table, format);
}

void cmd_intermodal(Context& ctx, const std::string& format) {
    const auto& s = ctx.cfg.source;
    const double l1 = wavelength_from_omega(s.pump1.omega0);
    const double l2 = wavelength_from_omega(s.pump2.omega0);
    io::Csv table({"mode", "lambda_s_nm", "lambda_i_nm", "dlambda_s_nm", "dlambda_i_nm", "delta_rad_s"});
    for (auto mode : ctx.cfg.intermodal_modes) {
        const auto r = metrics::intermodal_offsets(s.fiber, l1, l2, mode);
        table.row(mode.name(), {r.lambda_s * 1e9, r.lambda_i * 1e9, r.dlambda_s * 1e9, r.dlambda_i * 1e9, r.delta});
    }
    ctx.write_table("intermodal", table, format);
}

void cmd_figure(Context& ctx, const std::string& id) {
    const auto known = figures::figure_ids();
    if (std::find(known.begin(), known.end(), id) == known.end())
        throw ConfigError(fmt::format("unknown figure id '{}' (expected fig2..fig6 or table1)", id));
    ctx.dir /= id;
    fs::create_directories(ctx.dir);
    const auto res = figures::generate(id, ctx.dir, {ctx.cfg.grid, ctx.cfg.quad});
    for (const auto& p : res.files) {
        ctx.manifest.add(p);
        ctx.out << p.string() << '\n';
    }
    ctx.manifest.residuals = res.residuals;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Counter-propagating SFWM photon-pair source simulator", "cpsfwm"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "INI config file")->check(CLI::ExistingFile);
        sub->add_option("--out", common.out_dir, std::string("output directory (default: $") + out_dir_env + " or .)");
        sub->add_option("--grid", common.grid, "JSA grid points per axis (odd)");
        sub->add_option("--quad", common.quad, "initial inner quadrature nodes");
        sub->add_option("--seed", common.seed, "reserved; the pipeline is deterministic");
        sub->add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    std::optional<std::string> mode;
    std::optional<double> lmin, lmax;
    std::optional<int> samples;
    auto* disp = app.add_subcommand("dispersion", "n_eff, k and k' of one mode over a wavelength range");
    add_common(disp);
    disp->add_option("--mode", mode, "LP mode, e.g. LP01");
    disp->add_option("--lambda-min-nm", lmin);
    disp->add_option("--lambda-max-nm", lmax);
    disp->add_option("--samples", samples);

    std::optional<std::string> method;
    auto* jsa_cmd = app.add_subcommand("jsa", "joint spectral amplitude on the default grid");
    add_common(jsa_cmd);
    jsa_cmd->add_option("--method", method)->check(CLI::IsMember({"numeric", "linear"}));
    auto* pur = app.add_subcommand("purity", "Schmidt decomposition of the JSA");
    add_common(pur);
    pur->add_option("--method", method)->check(CLI::IsMember({"numeric", "linear"}));

    std::vector<double> lengths;
    auto* bright = app.add_subcommand("brightness", "pair rate against fiber length");
    add_common(bright);
    bright->add_option("--lengths-m", lengths, "fiber lengths, m")->delimiter(',');
    auto* band = app.add_subcommand("bandwidth", "idler FWHM against fiber length (mixed pumps)");
    add_common(band);
    band->add_option("--lengths-m", lengths, "fiber lengths, m")->delimiter(',');

    auto* inter = app.add_subcommand("intermodal", "signal/idler wavelengths for intermodal pumping");
    add_common(inter);

    std::string figure_id;
    auto* fig = app.add_subcommand("figure", "regenerate the data behind a figure or table");
    add_common(fig);
    fig->add_option("id", figure_id, "fig2|fig3|fig4|fig5|fig6|table1")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    }

    auto* sub = app.get_subcommands().front();
    try {
        auto ctx = make_context(common, sub->get_name(), out);
        auto& cfg = ctx.cfg;
        if (mode) cfg.dispersion_mode = dispersion::parse_mode(*mode);
        if (lmin) cfg.lambda_min_m = *lmin * 1e-9;
        if (lmax) cfg.lambda_max_m = *lmax * 1e-9;
        if (samples) cfg.samples = *samples;
        if (method) cfg.method = *method;
        if (!lengths.empty()) cfg.lengths_m = lengths;
        if (!(cfg.lambda_min_m > 0.0 && cfg.lambda_max_m > cfg.lambda_min_m))
            throw ConfigError("need 0 < lambda-min < lambda-max");
        if (cfg.samples < 2) throw ConfigError("--samples must be >= 2");
        for (double L : cfg.lengths_m)
            if (!(L > 0.0)) throw ConfigError("lengths must be positive");
        // Command-line overrides are part of the run's identity.
        ctx.manifest.config_hash = io::hash_hex(io::config_hash(cfg));

        const auto& name = sub->get_name();
        if (name == "dispersion") cmd_dispersion(ctx, common.format);
        else if (name == "jsa") cmd_jsa(ctx, common.format);
        else if (name == "purity") cmd_purity(ctx);
        else if (name == "brightness") cmd_brightness(ctx, common.format);
        else if (name == "bandwidth") cmd_bandwidth(ctx, common.format);
        else if (name == "intermodal") cmd_intermodal(ctx, common.format);
        else if (name == "figure") cmd_figure(ctx, figure_id);
        ctx.finish();
        return ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const ConvergenceError& e) {
        err << "convergence failure: " << e.what() << '\n';
        return convergence_error;
    } catch (const PhysicsError& e) {
        err << "physics error: " << e.what() << '\n';
        return physics_error;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
}

}  // namespace cpsfwm::cli
