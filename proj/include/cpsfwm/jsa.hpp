#pragma once

// Joint spectral amplitudes on rectangular (omega_s, omega_i) grids.

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpsfwm/source.hpp"

namespace cpsfwm::jsa {

using cdouble = std::complex<double>;
using source::SourceModel;

struct FrequencyGrid {
    std::vector<double> signal_axis;  // rad/s, absolute
    std::vector<double> idler_axis;   // rad/s, absolute
    double center_s = 0.0;
    double center_i = 0.0;
    double half_span_s = 0.0;  // rad/s
    double half_span_i = 0.0;

    /// Uniform axes with odd point counts; the centers are exact nodes.
    static FrequencyGrid centered(double center_s, double center_i, double half_span_s, double half_span_i,
                                  int n_s, int n_i);

    [[nodiscard]] int n_s() const { return static_cast<int>(signal_axis.size()); }
    [[nodiscard]] int n_i() const { return static_cast<int>(idler_axis.size()); }
    [[nodiscard]] double step_s() const { return 2.0 * half_span_s / (n_s() - 1); }
    [[nodiscard]] double step_i() const { return 2.0 * half_span_i / (n_i() - 1); }
    [[nodiscard]] double cell() const { return step_s() * step_i(); }
    /// Same spans, (n - 1) * factor + 1 points per axis.
    [[nodiscard]] FrequencyGrid refined(int factor) const;
};

struct JointSpectrum {
    FrequencyGrid grid;
    Eigen::MatrixXcd amplitude;  // rows: signal, cols: idler
    bool normalized = false;
    double raw_mass = 0.0;          // sum |F|^2 dws dwi before normalization
    double quad_residual = 0.0;     // inner quadrature convergence (pulsed numeric)
    int quad_nodes = 0;
    std::string method;

    [[nodiscard]] double mass() const { return amplitude.squaredNorm() * grid.cell(); }
    void normalize();
};

/// Phase mismatch of the pulsed process, rad/m.
double delta_k_pulsed(const SourceModel& model, double omega, double omega_s, double omega_i, double phi_nl = 0.0);
double kappa_pulsed(const SourceModel& model, double omega, double omega_s, double omega_i);
double delta_k_mixed(const SourceModel& model, double omega_s, double omega_i, double phi_nl = 0.0);
double kappa_mixed(const SourceModel& model, double omega_s, double omega_i);

/// exp(-B^2 x^2) [erf((1+L)/(4B) + iBx) + erf((1-L)/(4B) - iBx)], stable for any x.
cdouble phi_p(double x, double B, double Lambda);

struct QuadOptions {
    int initial_nodes = 129;
    int max_nodes = 129 * 256;
    double tolerance = 1e-6;
};

JointSpectrum jsa_pulsed_numeric(const SourceModel& model, const FrequencyGrid& grid, QuadOptions quad = {});
JointSpectrum jsa_pulsed_linear(const SourceModel& model, const FrequencyGrid& grid);
JointSpectrum jsa_mixed(const SourceModel& model, const FrequencyGrid& grid);
JointSpectrum jsa_mixed_linear(const SourceModel& model, const FrequencyGrid& grid);

/// Same as the normalized constructors but without normalization.
JointSpectrum jsa_pulsed_numeric_raw(const SourceModel& model, const FrequencyGrid& grid, QuadOptions quad = {});
JointSpectrum jsa_mixed_raw(const SourceModel& model, const FrequencyGrid& grid);

/// Raw pulsed amplitude at arbitrary (omega_s[j], omega_i[j]) points; the inner
/// node count is chosen on a subsample of the points as for the grid version.
struct PointSpectrum {
    std::vector<cdouble> amplitude;
    double quad_residual = 0.0;
    int quad_nodes = 0;
};
PointSpectrum pulsed_numeric_points(const SourceModel& model, const std::vector<double>& omega_s,
                                    const std::vector<double>& omega_i, QuadOptions quad = {});

/// RMS widths of the marginal intensities of the linear-model JSI, with the
/// sinc replaced by its Gaussian approximation, rad/s.
struct MarginalWidths {
    double signal = 0.0;
    double idler = 0.0;
};
MarginalWidths linear_widths(const SourceModel& model);

/// Default grid: n x n nodes (n odd), +-span_widths linear widths per axis.
FrequencyGrid default_grid(const SourceModel& model, int n = 257, double span_widths = 5.0);

/// sum |A||B| / sqrt(sum |A|^2 sum |B|^2); phase-insensitive, 1 for identical JSIs.
double overlap(const JointSpectrum& a, const JointSpectrum& b);

/// Pump exchange in the same-mode case: transpose of the spectrum with axes swapped.
JointSpectrum transposed(const JointSpectrum& f);

void write_csv(std::ostream& out, const JointSpectrum& f);
void write_json(std::ostream& out, const JointSpectrum& f);

}  // namespace cpsfwm::jsa
