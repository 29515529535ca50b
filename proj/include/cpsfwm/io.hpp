#pragma once

// Config files, deterministic output writing and run manifests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cpsfwm/source.hpp"

namespace cpsfwm::io {

inline constexpr const char* tool_version = "0.1.0";

struct RunConfig {
    source::SourceConfig source{};
    int grid = 257;
    int quad = 129;
    std::string method = "numeric";   // numeric | linear
    std::vector<double> lengths_m;    // sweeps (brightness, bandwidth)
    double lambda_min_m = 400e-9;     // dispersion table
    double lambda_max_m = 1000e-9;
    int samples = 601;
    dispersion::ModeId dispersion_mode{};
    std::vector<dispersion::ModeId> intermodal_modes{{1, 1}, {2, 1}, {0, 2}};
};

/// Defaults: 1.5 um / NA 0.13 fiber, 1 cm, pumps at 820 nm and 532 nm with
/// 0.01e12 rad/s bandwidths, 50 mW each, all waves in LP01.
RunConfig default_config();

/// INI text with sections [fiber], [pump1], [pump2], [run]. Every key carries
/// its unit in the name. Throws ConfigError on unknown keys, missing
/// sections or inconsistent values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form covering every semantic field; the hash is FNV-1a 64 of it.
std::string canonical(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t h);

/// Convert a FWHM wavelength bandwidth at the given center to angular sigma.
double sigma_from_fwhm_wavelength(double fwhm_m, double center_m);

/// Write via a temporary file in the same directory and rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Table builder: header row, LF endings, '%.17g' numbers. An optional
/// leading text label per row.
class Csv {
public:
    explicit Csv(std::vector<std::string> header);
    Csv& row(const std::vector<double>& values);
    Csv& row(const std::string& label, const std::vector<double>& values);
    [[nodiscard]] const std::string& str() const { return text_; }
    [[nodiscard]] std::size_t rows() const { return rows_.size(); }
    /// {"columns": [...], "rows": [[...], ...]}
    [[nodiscard]] std::string json() const;

private:
    std::vector<std::string> header_;
    std::vector<std::pair<std::string, std::vector<double>>> rows_;
    std::string text_;
};

struct Manifest {
    std::string command;
    std::string config_hash;
    std::vector<std::string> outputs;
    std::map<std::string, double> residuals;

    void add(const std::filesystem::path& file) { outputs.push_back(file.filename().string()); }
    [[nodiscard]] std::string json() const;
};

/// Writes manifest.json into dir.
void write_manifest(const std::filesystem::path& dir, const Manifest& m);

}  // namespace cpsfwm::io
