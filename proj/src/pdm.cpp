#include "lcinv/pdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lcinv/parallel.hpp"

namespace lcinv::pdm {

namespace {

void check_times(const std::vector<double>& times, Eigen::Index rows) {
    if (times.size() < 4) throw ArgumentError("pdm: tracklet too short (need >= 4 samples)");
    if (Eigen::Index(times.size()) != rows) throw ArgumentError("pdm: times and samples lengths differ");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ArgumentError("pdm: times must be strictly increasing");
}

double min_spacing(const std::vector<double>& times) {
    double dt = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i) dt = std::min(dt, times[i] - times[i - 1]);
    return dt;
}

}  // namespace

Eigen::MatrixXd detrend(const std::vector<double>& times, const Eigen::MatrixXd& samples) {
    check_times(times, samples.rows());
    const double half = 0.5 * (times.back() - times.front());
    const Eigen::Index n = samples.rows();
    Eigen::MatrixXd out(n, samples.cols());
    // Two-pointer window [lo, hi) over |t_j - t_i| <= T/2 with a running sum.
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(samples.cols());
    Eigen::Index lo = 0, hi = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        while (hi < n && times[hi] - times[i] <= half + 1e-12) sum += samples.row(hi++);
        while (times[i] - times[lo] > half + 1e-12) sum -= samples.row(lo++);
        out.row(i) = samples.row(i) - sum / double(hi - lo);
    }
    out.rowwise() -= out.colwise().mean();
    return out;
}

Eigen::MatrixXd detrend(const sim::Tracklet& tracklet) {
    Eigen::MatrixXd m(tracklet.size(), tracklet.channels());
    for (std::size_t i = 0; i < tracklet.size(); ++i) m.row(i) = tracklet.spectra[i].transpose();
    return detrend(tracklet.times, m);
}

std::vector<double> trial_grid(double lo, double hi, int count) {
    if (!(lo > 0 && hi > lo)) throw ArgumentError("trial_grid: need 0 < lo < hi");
    if (count < 2) throw ArgumentError("trial_grid: count must be >= 2");
    std::vector<double> out(count);
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < count; ++i) out[i] = lo * std::exp(ratio * i / (count - 1));
    return out;
}

std::vector<double> default_trial_grid(const std::vector<double>& times, int count) {
    if (times.size() < 4) throw ArgumentError("pdm: tracklet too short (need >= 4 samples)");
    return trial_grid(4.0 * min_spacing(times), 0.5 * (times.back() - times.front()), count);
}

double dispersion(const std::vector<double>& times, const Eigen::MatrixXd& detrended, double period, int bins) {
    const Eigen::Index k = detrended.cols();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(bins, k), sq = Eigen::MatrixXd::Zero(bins, k);
    std::vector<int> count(bins, 0);
    const double t0 = times.front();
    for (std::size_t i = 0; i < times.size(); ++i) {
        double phase = std::fmod((times[i] - t0) / period, 1.0);
        int b = std::min(bins - 1, int(phase * bins));
        ++count[b];
        sum.row(b) += detrended.row(i);
        sq.row(b) += detrended.row(i).cwiseAbs2();
    }
    double ss = 0;
    int dof = 0;
    for (int b = 0; b < bins; ++b) {
        if (count[b] < 2) continue;
        const double m = count[b];
        ss += (sq.row(b) - sum.row(b).cwiseAbs2() / m).sum();
        dof += count[b] - 1;
    }
    return dof > 0 ? ss / dof : 0.0;
}

DispersionCurve dispersion_curve(const std::vector<double>& times, const Eigen::MatrixXd& detrended,
                                 const std::vector<double>& trials, int bins, int workers) {
    check_times(times, detrended.rows());
    if (trials.empty()) throw ArgumentError("pdm_scan: empty trial grid");
    if (bins < 4) throw ArgumentError("pdm_scan: bins must be >= 4");
    const double dt = min_spacing(times), span = times.back() - times.front();
    for (double p : trials)
        if (!(p > 2.0 * dt && p < span)) throw ArgumentError("pdm_scan: trial period outside (2 dt, T)");
    DispersionCurve c{trials, std::vector<double>(trials.size())};
    parallel_for(trials.size(), workers, [&](std::size_t i) { c.values[i] = dispersion(times, detrended, trials[i], bins); });
    return c;
}

PeriodCandidates pdm_scan(const std::vector<double>& times, const Eigen::MatrixXd& detrended,
                          const std::vector<double>& trials, int bins, int workers) {
    const DispersionCurve c = dispersion_curve(times, detrended, trials, bins, workers);
    const auto& d = c.values;
    std::vector<std::size_t> minima;
    // Neighbouring trials can bin identically, so a minimum may be a flat run;
    // it counts when strictly below both sides and is reported at its centre.
    for (std::size_t i = 1; i + 1 < d.size();) {
        std::size_t j = i;
        while (j + 1 < d.size() && d[j + 1] == d[i]) ++j;
        if (j + 1 < d.size() && d[i] < d[i - 1] && d[j] < d[j + 1]) minima.push_back((i + j) / 2);
        i = j + 1;
    }
    if (minima.empty()) minima.push_back(std::size_t(std::min_element(d.begin(), d.end()) - d.begin()));
    std::stable_sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    if (minima.size() > 5) minima.resize(5);
    PeriodCandidates out;
    for (std::size_t i : minima) {
        out.periods.push_back(c.periods[i]);
        out.dispersions.push_back(d[i]);
    }
    return out;
}

PeriodCandidates estimate_period(const sim::Tracklet& tracklet, int bins, int grid, int workers) {
    return pdm_scan(tracklet.times, detrend(tracklet), default_trial_grid(tracklet.times, grid), bins, workers);
}

}  // namespace lcinv::pdm
