#include "cpsfwm/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cpsfwm/constants.hpp"
#include "cpsfwm/errors.hpp"

namespace cpsfwm::io {

namespace pt = boost::property_tree;
using dispersion::ModeId;
using namespace constants;

RunConfig default_config() {
    RunConfig cfg;
    cfg.source = source::make_source(dispersion::FiberSpec{}, 820e-9, 0.01e12, 532e-9, 0.01e12);
    cfg.source.pump1.avg_power = 0.05;
    cfg.source.pump2.avg_power = 0.05;
    return cfg;
}

double sigma_from_fwhm_wavelength(double fwhm_m, double center_m) {
    const double fwhm_omega = 2.0 * pi * speed_of_light * fwhm_m / (center_m * center_m);
    return fwhm_omega / std::sqrt(2.0 * std::log(2.0));
}

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& section, const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (trim(text.substr(pos)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(fmt::format("[{}] {}: '{}' is not a finite number", section, key, text));
}

int to_int(const std::string& section, const std::string& key, const std::string& text) {
    const double v = to_double(section, key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError(fmt::format("[{}] {}: '{}' is not an integer", section, key, text));
    return static_cast<int>(v);
}

bool to_bool(const std::string& section, const std::string& key, std::string text) {
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(fmt::format("[{}] {}: '{}' is not a boolean", section, key, text));
}

ModeId to_mode(const std::string& section, const std::string& key, const std::string& text) {
    try {
        return dispersion::parse_mode(trim(text));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("[{}] {}: {}", section, key, e.what()));
    }
}

// Section reader that tracks consumed keys so leftovers can be rejected.
class Section {
public:
    Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
        if (auto child = root.get_child_optional(name_)) tree_ = *child;
        present_ = root.get_child_optional(name_).has_value();
    }

    [[nodiscard]] bool present() const { return present_; }

    std::optional<std::string> take(const std::string& key) {
        const auto v = tree_.get_optional<std::string>(key);
        if (v) used_.insert(key);
        return v ? std::optional<std::string>(trim(*v)) : std::nullopt;
    }

    std::optional<double> number(const std::string& key) {
        const auto v = take(key);
        return v ? std::optional<double>(to_double(name_, key, *v)) : std::nullopt;
    }

    // At most one of the alternative keys may appear.
    std::optional<std::pair<std::string, double>> one_of(const std::vector<std::string>& keys) {
        std::optional<std::pair<std::string, double>> found;
        for (const auto& k : keys) {
            if (auto v = number(k)) {
                if (found)
                    throw ConfigError(fmt::format("[{}] keys '{}' and '{}' are mutually exclusive", name_,
                                                  found->first, k));
                found = std::make_pair(k, *v);
            }
        }
        return found;
    }

    void finish() const {
        for (const auto& [key, value] : tree_) {
            if (!used_.count(key)) throw ConfigError(fmt::format("[{}] unknown key '{}'", name_, key));
        }
    }

    [[nodiscard]] const std::string& name() const { return name_; }

private:
    std::string name_;
    pt::ptree tree_;
    bool present_ = false;
    std::set<std::string> used_;
};

void read_pump(Section& s, source::PumpConfig& pump) {
    if (auto f = s.one_of({"wavelength_nm", "wavelength_m", "omega_rad_s"})) {
        if (f->second <= 0.0) throw ConfigError(fmt::format("[{}] {} must be positive", s.name(), f->first));
        if (f->first == "wavelength_nm") pump.omega0 = omega_from_wavelength(f->second * 1e-9);
        else if (f->first == "wavelength_m") pump.omega0 = omega_from_wavelength(f->second);
        else pump.omega0 = f->second;
    }
    if (auto b = s.one_of({"sigma_rad_s", "sigma_thz", "fwhm_rad_s", "fwhm_nm"})) {
        if (b->second < 0.0) throw ConfigError(fmt::format("[{}] {} must be non-negative", s.name(), b->first));
        if (b->first == "sigma_rad_s") pump.sigma = b->second;
        else if (b->first == "sigma_thz") pump.sigma = b->second * 1e12;
        else if (b->first == "fwhm_rad_s") pump.sigma = b->second / std::sqrt(2.0 * std::log(2.0));
        else pump.sigma = sigma_from_fwhm_wavelength(b->second * 1e-9, wavelength_from_omega(pump.omega0));
    }
    if (auto p = s.number("avg_power_w")) pump.avg_power = *p;
    if (auto m = s.take("mode")) pump.mode = to_mode(s.name(), "mode", *m);
    s.finish();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config parse error: {}", e.what()));
    }
    for (const auto& [name, child] : root) {
        if (name != "fiber" && name != "pump1" && name != "pump2" && name != "run")
            throw ConfigError(fmt::format("unknown section [{}]", name));
        if (child.empty() && !child.data().empty())
            throw ConfigError(fmt::format("key '{}' outside of any section", name));
    }

    RunConfig cfg = default_config();
    auto& src = cfg.source;

    Section fiber(root, "fiber");
    if (auto r = fiber.one_of({"core_radius_um", "core_radius_m"}))
        src.fiber.core_radius = r->first == "core_radius_um" ? r->second * 1e-6 : r->second;
    if (auto na = fiber.number("numerical_aperture")) src.fiber.numerical_aperture = *na;
    if (auto len = fiber.number("length_m")) src.fiber.length = *len;
    if (auto b = fiber.take("sellmeier_b")) {
        const auto items = split_list(*b);
        if (items.size() != 3) throw ConfigError("[fiber] sellmeier_b needs three values");
        for (int j = 0; j < 3; ++j) src.fiber.cladding.b[j] = to_double("fiber", "sellmeier_b", items[j]);
    }
    if (auto c = fiber.take("sellmeier_c_um")) {
        const auto items = split_list(*c);
        if (items.size() != 3) throw ConfigError("[fiber] sellmeier_c_um needs three values");
        for (int j = 0; j < 3; ++j) src.fiber.cladding.c_um[j] = to_double("fiber", "sellmeier_c_um", items[j]);
    }
    fiber.finish();

    Section p1(root, "pump1");
    read_pump(p1, src.pump1);
    Section p2(root, "pump2");
    read_pump(p2, src.pump2);

    // Signal and idler follow the pumps unless set explicitly.
    src.signal_mode = src.pump1.mode;
    src.idler_mode = src.pump2.mode;

    Section run(root, "run");
    if (auto m = run.take("signal_mode")) src.signal_mode = to_mode("run", "signal_mode", *m);
    if (auto m = run.take("idler_mode")) src.idler_mode = to_mode("run", "idler_mode", *m);
    if (auto v = run.number("rep_rate_hz")) src.rep_rate = *v;
    if (auto v = run.number("tau_s")) src.tau = *v;
    if (auto v = run.number("chi3_m2_v2")) src.chi3 = *v;
    if (auto v = run.take("include_phi_nl")) src.include_phi_nl = to_bool("run", "include_phi_nl", *v);
    if (auto v = run.take("grid")) cfg.grid = to_int("run", "grid", *v);
    if (auto v = run.take("quad")) cfg.quad = to_int("run", "quad", *v);
    if (auto v = run.take("method")) cfg.method = *v;
    if (auto v = run.take("lengths_m")) {
        cfg.lengths_m.clear();
        for (const auto& item : split_list(*v)) cfg.lengths_m.push_back(to_double("run", "lengths_m", item));
    }
    if (auto v = run.number("lambda_min_nm")) cfg.lambda_min_m = *v * 1e-9;
    if (auto v = run.number("lambda_max_nm")) cfg.lambda_max_m = *v * 1e-9;
    if (auto v = run.take("samples")) cfg.samples = to_int("run", "samples", *v);
    if (auto v = run.take("dispersion_mode")) cfg.dispersion_mode = to_mode("run", "dispersion_mode", *v);
    if (auto v = run.take("intermodal_modes")) {
        cfg.intermodal_modes.clear();
        for (const auto& item : split_list(*v)) cfg.intermodal_modes.push_back(to_mode("run", "intermodal_modes", item));
    }
    run.finish();

    if (cfg.grid < 3 || cfg.grid % 2 == 0) throw ConfigError("[run] grid must be an odd number >= 3");
    if (cfg.quad < 2) throw ConfigError("[run] quad must be >= 2");
    if (cfg.method != "numeric" && cfg.method != "linear")
        throw ConfigError(fmt::format("[run] method must be numeric or linear, got '{}'", cfg.method));
    if (cfg.samples < 2) throw ConfigError("[run] samples must be >= 2");
    if (!(cfg.lambda_min_m > 0.0) || !(cfg.lambda_max_m > cfg.lambda_min_m))
        throw ConfigError("[run] need 0 < lambda_min_nm < lambda_max_nm");
    for (double len : cfg.lengths_m)
        if (!(len > 0.0)) throw ConfigError("[run] lengths_m entries must be positive");
    src.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical(const RunConfig& cfg) {
    const auto& s = cfg.source;
    std::string out;
    auto put = [&](const char* key, double v) { out += fmt::format("{}={:.17g}\n", key, v); };
    auto put_mode = [&](const char* key, ModeId m) { out += fmt::format("{}={}\n", key, m.name()); };
    put("fiber.core_radius", s.fiber.core_radius);
    put("fiber.numerical_aperture", s.fiber.numerical_aperture);
    put("fiber.length", s.fiber.length);
    for (int j = 0; j < 3; ++j) {
        put("fiber.sellmeier_b", s.fiber.cladding.b[j]);
        put("fiber.sellmeier_c_um", s.fiber.cladding.c_um[j]);
    }
    put("fiber.sellmeier_min_um", s.fiber.cladding.min_wavelength_um);
    put("fiber.sellmeier_max_um", s.fiber.cladding.max_wavelength_um);
    for (const auto* p : {&s.pump1, &s.pump2}) {
        put("pump.omega0", p->omega0);
        put("pump.sigma", p->sigma);
        put("pump.avg_power", p->avg_power);
        put_mode("pump.mode", p->mode);
    }
    put_mode("signal_mode", s.signal_mode);
    put_mode("idler_mode", s.idler_mode);
    put("rep_rate", s.rep_rate);
    put("tau", s.tau);
    put("chi3", s.chi3);
    put("include_phi_nl", s.include_phi_nl ? 1.0 : 0.0);
    put("grid", cfg.grid);
    put("quad", cfg.quad);
    out += fmt::format("method={}\n", cfg.method);
    for (double len : cfg.lengths_m) put("length", len);
    put("lambda_min", cfg.lambda_min_m);
    put("lambda_max", cfg.lambda_max_m);
    put("samples", cfg.samples);
    put_mode("dispersion_mode", cfg.dispersion_mode);
    for (auto m : cfg.intermodal_modes) put_mode("intermodal_mode", m);
    return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical(cfg)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) { return fmt::format("{:016x}", h); }

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", tmp.string()));
    }
    fs::rename(tmp, path);
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {
    const auto& h = header_;
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (j) text_ += ',';
        text_ += h[j];
    }
    text_ += '\n';
}

Csv& Csv::row(const std::vector<double>& values) {
    if (values.size() != header_.size()) throw std::invalid_argument("Csv::row: column count mismatch");
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (j) text_ += ',';
        text_ += fmt::format("{:.17g}", values[j]);
    }
    text_ += '\n';
    rows_.emplace_back(std::string{}, values);
    return *this;
}

Csv& Csv::row(const std::string& label, const std::vector<double>& values) {
    if (values.size() + 1 != header_.size()) throw std::invalid_argument("Csv::row: column count mismatch");
    text_ += label;
    for (double v : values) text_ += fmt::format(",{:.17g}", v);
    text_ += '\n';
    rows_.emplace_back(label, values);
    return *this;
}

std::string Csv::json() const {
    nlohmann::ordered_json j;
    j["columns"] = header_;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& [label, values] : rows_) {
        auto r = nlohmann::ordered_json::array();
        if (header_.size() == values.size() + 1) r.push_back(label);
        for (double v : values) r.push_back(v);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(1) + "\n";
}

std::string Manifest::json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    j["outputs"] = outputs;
    nlohmann::ordered_json res = nlohmann::ordered_json::object();
    for (const auto& [k, v] : residuals) res[k] = v;
    j["residuals"] = res;
    return j.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
    atomic_write(dir / "manifest.json", m.json());
}

}  // namespace cpsfwm::io
