#pragma once

// Observables: Schmidt purity, pair rates, characteristic lengths,
// bandwidths and intermodal phasematching offsets.

#include <string>
#include <vector>

#include "cpsfwm/jsa.hpp"

namespace cpsfwm::metrics {

using jsa::JointSpectrum;
using source::SourceModel;

struct SchmidtResult {
    double schmidt_number = 1.0;
    double purity = 1.0;
    std::vector<double> singular_values;  // normalized, descending; squares sum to 1
};

/// Throws PhysicsError for an all-zero spectrum.
SchmidtResult purity(const JointSpectrum& f);

struct BrightnessResult {
    double pairs_per_second = 0.0;
    std::string method;   // "numeric" or "closed_form"
    double residual = 0;  // relative change against the half-resolution grid
    int grid_points = 0;
};

/// 2-D quadrature of h |F|^2 with pointwise h. Envelopes enter with unit peak.
/// Without a grid the pulsed rate is integrated on a lattice aligned with the
/// pump envelope and phasematching axes.
BrightnessResult brightness_pulsed_numeric(const SourceModel& model);
BrightnessResult brightness_pulsed_numeric(const SourceModel& model, const jsa::FrequencyGrid& grid);
BrightnessResult brightness_pulsed_closed(const SourceModel& model);
BrightnessResult brightness_mixed_numeric(const SourceModel& model);
BrightnessResult brightness_mixed_numeric(const SourceModel& model, const jsa::FrequencyGrid& grid);
BrightnessResult brightness_mixed_closed(const SourceModel& model);

/// Rectangular grids: the pulsed one for explicit-grid calls, the mixed one is the default.
jsa::FrequencyGrid brightness_grid_pulsed(const SourceModel& model, int n = 129);
jsa::FrequencyGrid brightness_grid_mixed(const SourceModel& model);

/// h(ws, wi) = ws ks'(ws) / ns^2 * wi ki'(wi) / ni^2.
double h_factor(const SourceModel& model, double omega_s, double omega_i);

double effective_length(const SourceModel& model);
double factorability_threshold_pulsed(const SourceModel& model);
double factorability_threshold_mixed(const SourceModel& model);
/// Gaussian-approximation idler bandwidth of the mixed configuration (rad/s,
/// same convention as the pump sigma).
double idler_bandwidth(const SourceModel& model);
double length_for_bandwidth(const SourceModel& model, double delta_omega);

enum class Axis { signal, idler };

/// FWHM of the marginal intensity by linear interpolation of the half-maximum
/// crossings. Throws PhysicsError if the marginal has no dominant lobe or the
/// half maximum is not reached inside the grid.
double marginal_fwhm(const JointSpectrum& f, Axis axis);

struct IntermodalOffsets {
    dispersion::ModeId mode;
    double delta = 0.0;  // rad/s; signal at w1 + delta, idler at w2 - delta
    double lambda_s = 0.0, lambda_i = 0.0;    // m
    double dlambda_s = 0.0, dlambda_i = 0.0;  // m, relative to the pumps
};

/// Pump 1 and idler in LP01; pump 2 and signal in mode_x.
IntermodalOffsets intermodal_offsets(const dispersion::FiberSpec& fiber, double lambda1_m, double lambda2_m,
                                     dispersion::ModeId mode_x);

}  // namespace cpsfwm::metrics
