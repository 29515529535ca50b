#pragma once

// Data behind each reproduced figure and table, written as CSV panels.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cpsfwm/io.hpp"
#include "cpsfwm/metrics.hpp"

namespace cpsfwm::figures {

struct FigureOptions {
    int grid = 257;  // JSA grid points per axis
    int quad = 129;  // initial inner quadrature nodes
};

struct FigureResult {
    std::vector<std::filesystem::path> files;
    std::map<std::string, double> residuals;
};

const std::vector<std::string>& figure_ids();

/// Writes the panels of `id` into dir. Throws ConfigError for an unknown id.
FigureResult generate(const std::string& id, const std::filesystem::path& dir, const FigureOptions& opt = {});

// Configurations shared by the figures and the tests.
dispersion::FiberSpec small_core_fiber(double length = 0.01);  // r = 1.5 um, NA = 0.13
dispersion::FiberSpec few_mode_fiber();                         // r = 2 um, NA = 0.3
/// 'a': sigma1 = 0.01e12, sigma2 = 0.03e12; 'e': both 0.01e12; 'i': mixed, sigma = 0.01e12. L = 1 cm.
source::SourceConfig jsa_row_config(char row);
/// 0.42 nm FWHM pulse at 820 nm, monochromatic 532 nm.
source::SourceConfig narrowband_config(double length);
source::SourceConfig pulsed_config(double sigma1, double sigma2, double length);

std::vector<double> log_space(double lo, double hi, int n);

/// Sweep of purity against sigma2 using the linear model.
struct PuritySweep {
    std::vector<double> sigma2;
    std::vector<double> purity;
};
PuritySweep purity_sweep(const source::SourceModel& base, const std::vector<double>& sigma2, int grid);

/// Contiguous sigma2 interval where the linear-model purity is at least
/// `level`, and three points inside it spaced evenly in log sigma2.
struct Plateau {
    double lo = 0.0, hi = 0.0;
    std::array<double, 3> marks{};
};
Plateau purity_plateau(const source::SourceModel& base, double level = 0.99, int grid = 129);

}  // namespace cpsfwm::figures
