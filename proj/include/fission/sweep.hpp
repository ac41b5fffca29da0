#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fission/density.hpp"
#include "fission/error.hpp"
#include "fission/evaluation.hpp"

namespace fission {

struct SweepPoint {
    double t = 0.0;
    std::size_t n0 = 0;
    int k = 0;
    bool separated = false;
    std::optional<double> accuracy;
    std::optional<double> f_score;
};

/// Maximal run of consecutive t values (at one n0) giving the same k.
struct StableInterval {
    std::size_t n0 = 0;
    double t_begin = 0.0;
    double t_end = 0.0;
    int k = 0;
    std::size_t length = 0;
};

struct SweepReport {
    std::vector<SweepPoint> points; ///< n0-major, t ascending
    std::vector<StableInterval> intervals;
};

/// Inclusive grid lo, lo+step, ..., up to hi.
inline std::vector<double> t_grid(double lo, double hi, double step) {
    if (!(step > 0.0)) throw ValidationError("t step must be > 0");
    if (lo > hi) throw ValidationError("empty t range: t_min > t_max");
    std::vector<double> ts;
    for (std::size_t i = 0;; ++i) {
        const double t = lo + static_cast<double>(i) * step;
        if (t > hi + 1e-9 * step) break;
        ts.push_back(t);
    }
    return ts;
}

/// Runs FC-KNN for every (t, n0) pair. `base` supplies the remaining parameters.
inline SweepReport sweep(const DistanceMatrix& dm, std::optional<std::span<const int>> truth,
                         std::span<const double> ts, std::span<const std::size_t> n0s, const FcParams& base) {
    if (ts.empty() || n0s.empty()) throw ValidationError("sweep needs a nonempty t range and n0 list");
    SweepReport report;
    for (std::size_t n0 : n0s) {
        const DensityVector density = knn_density(dm, n0);
        for (double t : ts) {
            FcParams params = base;
            params.t = t;
            params.n0 = N0Rule::count(n0);
            params.validate(dm.size());
            const DenoiseResult dn = denoise(dm, density, params);
            const Partition full = cluster_denoised(dm, dn, params);
            SweepPoint pt{t, n0, full.k, dn.separated, std::nullopt, std::nullopt};
            if (truth) {
                pt.accuracy = accuracy(full.labels, *truth).accuracy;
                pt.f_score = f_score(full.labels, *truth);
            }
            report.points.push_back(pt);
        }
        const std::size_t base_idx = report.points.size() - ts.size();
        for (std::size_t i = 0; i < ts.size();) {
            std::size_t j = i;
            while (j + 1 < ts.size() && report.points[base_idx + j + 1].k == report.points[base_idx + i].k) ++j;
            report.intervals.push_back({n0, ts[i], ts[j], report.points[base_idx + i].k, j - i + 1});
            i = j + 1;
        }
    }
    return report;
}

} // namespace fission
