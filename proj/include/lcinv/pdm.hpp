#pragma once

// Phase dispersion minimization over multi-channel lightcurves.

#include <vector>

#include <Eigen/Dense>

#include "lcinv/scenario_sim.hpp"

namespace lcinv::pdm {

struct PeriodCandidates {
    std::vector<double> periods;      // s, best first
    std::vector<double> dispersions;  // ascending
};

/// Per channel: subtract an edge-truncated moving average of width equal
/// to the tracklet duration, then remove the mean. Rows are samples.
Eigen::MatrixXd detrend(const std::vector<double>& times, const Eigen::MatrixXd& samples);
Eigen::MatrixXd detrend(const sim::Tracklet& tracklet);

/// `count` geometrically spaced periods from lo to hi inclusive.
std::vector<double> trial_grid(double lo, double hi, int count = 2000);
/// Default grid [4 dt, T/2] for a tracklet with minimum spacing dt, duration T.
std::vector<double> default_trial_grid(const std::vector<double>& times, int count = 2000);

/// Within-bin variance for one trial period: squared deviations from the
/// bin means summed over bins, divided by the pooled degrees of freedom
/// sum(n_b - 1) (bins with < 2 samples skipped), then summed over channels.
/// Pooling keeps folds that leave bins empty from looking artificially tight.
double dispersion(const std::vector<double>& times, const Eigen::MatrixXd& detrended, double period, int bins);

struct DispersionCurve {
    std::vector<double> periods;
    std::vector<double> values;
};

DispersionCurve dispersion_curve(const std::vector<double>& times, const Eigen::MatrixXd& detrended,
                                 const std::vector<double>& trials, int bins = 20, int workers = 1);

/// Local minima of the dispersion curve (a value or flat run strictly below both
/// neighbours, reported at the run centre),
/// five lowest, ascending. A monotone curve yields its global minimum.
PeriodCandidates pdm_scan(const std::vector<double>& times, const Eigen::MatrixXd& detrended,
                          const std::vector<double>& trials, int bins = 20, int workers = 1);

/// Detrend + default grid + scan.
PeriodCandidates estimate_period(const sim::Tracklet& tracklet, int bins = 20, int grid = 2000, int workers = 1);

}  // namespace lcinv::pdm
