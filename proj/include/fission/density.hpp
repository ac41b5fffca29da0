#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fission/error.hpp"
#include "fission/fission_core.hpp"
#include "fission/metric_space.hpp"
#include "fission/neighbor_index.hpp"
#include "fission/parallel.hpp"

namespace fission {

// ============================================================================
// KNN local density
// ============================================================================

/// rho[i] = 1 / (sum of distances to the n0 nearest other points).
/// +infinity when all of those neighbours sit at distance 0.
struct DensityVector {
    std::vector<double> rho;
    std::size_t n0 = 0;
};

namespace detail {

/// Neighbour distances are summed in ascending order, so both density routes
/// produce bit-identical values.
inline double reciprocal_sum(std::span<double> ascending) {
    double sum = 0.0;
    for (double d : ascending) sum += d;
    return sum > 0.0 ? 1.0 / sum : std::numeric_limits<double>::infinity();
}

inline void check_n0(std::size_t n, std::size_t n0) {
    if (n0 < 1 || n0 + 1 > n)
        throw ValidationError("n0 must satisfy 1 <= n0 <= n-1 (n0 = " + std::to_string(n0) +
                              ", n = " + std::to_string(n) + ")");
}

} // namespace detail

/// Density from a dense distance matrix: O(n) selection per row.
inline DensityVector knn_density(const DistanceMatrix& dm, std::size_t n0) {
    const std::size_t n = dm.size();
    detail::check_n0(n, n0);
    DensityVector out{std::vector<double>(n), n0};
    parallel::for_each_block(n, [&](std::size_t begin, std::size_t end) {
        std::vector<double> others(n - 1);
        for (std::size_t i = begin; i < end; ++i) {
            const auto row = dm.row(i);
            std::size_t w = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) others[w++] = row[j];
            const auto kth = others.begin() + static_cast<std::ptrdiff_t>(n0 - 1);
            std::nth_element(others.begin(), kth, others.end());
            std::sort(others.begin(), kth + 1);
            out.rho[i] = detail::reciprocal_sum({others.data(), n0});
        }
    });
    return out;
}

/// Density straight from the points through a k-d tree, without a distance
/// matrix: roughly O(n log n * n0). Bit-identical to the matrix route.
inline DensityVector knn_density(const Dataset& ds, const Metric& metric, std::size_t n0) {
    const std::size_t n = ds.size();
    detail::check_n0(n, n0);
    const NeighborIndex index(ds, metric);
    DensityVector out{std::vector<double>(n), n0};
    parallel::for_each_block(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto nearest = index.nearest_distances(i, n0);
            out.rho[i] = detail::reciprocal_sum(nearest);
        }
    });
    return out;
}

// ============================================================================
// Parameters
// ============================================================================

/// Neighbour count: a fixed number, or ceil(fraction * n).
struct N0Rule {
    enum class Kind { count, fraction };
    Kind kind = Kind::fraction;
    double value = 0.02;

    static N0Rule count(std::size_t c) { return {Kind::count, static_cast<double>(c)}; }
    static N0Rule fraction(double f) { return {Kind::fraction, f}; }

    /// "5" or "2%".
    static N0Rule parse(std::string_view text) {
        const bool percent = text.ends_with('%');
        const std::string body(percent ? text.substr(0, text.size() - 1) : text);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(body, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != body.size() || !(v > 0.0))
            throw ValidationError("bad n0 '" + std::string(text) + "' (expected a positive integer or a percentage)");
        if (percent) return fraction(v / 100.0);
        if (v != std::floor(v)) throw ValidationError("n0 count must be an integer: '" + std::string(text) + "'");
        return count(static_cast<std::size_t>(v));
    }

    std::size_t resolve(std::size_t n) const {
        if (kind == Kind::count) return static_cast<std::size_t>(value);
        // The small slack keeps e.g. 0.02 * 150 from rounding up to 4.
        return static_cast<std::size_t>(std::ceil(value * static_cast<double>(n) - 1e-9));
    }

    std::string describe() const {
        if (kind == Kind::count) return std::to_string(static_cast<std::size_t>(value));
        return io::format_double(value * 100.0) + "%";
    }
};

/// Stop threshold for fission on the dense subset.
enum class DenseStop {
    d0,        ///< d0 of the dense subset
    t_times_d0 ///< t * d0 of the dense subset, the same bar the denoising loop used
};

inline std::string to_string(DenseStop rule) { return rule == DenseStop::d0 ? "d0" : "t*d0"; }

inline DenseStop parse_dense_stop(std::string_view text) {
    if (text == "d0") return DenseStop::d0;
    if (text == "t*d0" || text == "t-d0") return DenseStop::t_times_d0;
    throw ValidationError("unknown dense-subset stop rule '" + std::string(text) + "' (expected d0 or t*d0)");
}

struct FcParams {
    double t = 4.0;
    N0Rule n0 = N0Rule::fraction(0.02);
    double r_start = 0.4;
    double r_step = 0.1;
    double r_max = 0.9;
    Metric metric = Metric::euclidean();
    ThresholdMode threshold_mode = ThresholdMode::global;
    DenseStop dense_stop = DenseStop::t_times_d0;

    void validate(std::size_t n) const {
        if (!(t > 1.0) || !std::isfinite(t)) throw ValidationError("t must be a finite value > 1");
        if (!(r_start > 0.0 && r_start <= r_max && r_max < 1.0))
            throw ValidationError("removal ratios must satisfy 0 < r_start <= r_max < 1");
        if (!(r_step > 0.0)) throw ValidationError("r_step must be > 0");
        const std::size_t k = n0.resolve(n);
        if (k < 1 || k >= n)
            throw ValidationError("n0 resolves to " + std::to_string(k) + ", outside [1, n-1] for n = " +
                                  std::to_string(n));
    }
};

// ============================================================================
// Denoising
// ============================================================================

struct DenoiseResult {
    Subset dense_subset;
    std::vector<Index> removed; ///< ascending; may be empty
    double r_final = 0.0;
    double mc_final = 0.0;
    double d0_final = 0.0;
    bool separated = false;
    std::size_t rounds = 0; ///< number of removal ratios tried
};

namespace detail {

/// floor(r * n) with slack for ratios such as 0.7 * 10 = 6.9999...
inline std::size_t removal_count(double r, std::size_t n) {
    return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
}

/// Indices in removal order: ascending rho, ties removed higher index first.
/// Points with infinite rho are excluded; they are never removed.
inline std::vector<Index> removal_order(const DensityVector& density) {
    std::vector<Index> order;
    order.reserve(density.rho.size());
    for (Index i = 0; i < density.rho.size(); ++i)
        if (std::isfinite(density.rho[i])) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (density.rho[a] != density.rho[b]) return density.rho[a] < density.rho[b];
        return a > b;
    });
    return order;
}

} // namespace detail

/// Strips the lowest-density points until the remaining set shows a crack
/// larger than t * d0, raising the removal ratio from r_start by r_step up to
/// r_max. Each round removes floor(r * n) points of the whole dataset, by the
/// density computed once up front.
inline DenoiseResult denoise(const DistanceMatrix& dm, const DensityVector& density, const FcParams& params) {
    const std::size_t n = dm.size();
    if (n < 5) throw ValidationError("denoising needs at least 5 points");
    if (density.rho.size() != n) throw ValidationError("density vector does not match the distance matrix");
    params.validate(n);

    const std::vector<Index> order = detail::removal_order(density);
    auto split_at = [&](double r) {
        const std::size_t count = std::min(detail::removal_count(r, n), order.size());
        std::vector<char> gone(n, 0);
        for (std::size_t i = 0; i < count; ++i) gone[order[i]] = 1;
        std::vector<Index> kept, removed;
        for (Index i = 0; i < n; ++i) (gone[i] ? removed : kept).push_back(i);
        if (kept.size() < 2) throw AlgorithmError("over-denoised: fewer than 2 points remain");
        return std::pair{Subset(std::move(kept)), std::move(removed)};
    };

    std::size_t step = 0;
    double r = params.r_start;
    auto [kept, removed] = split_at(r);
    double d0 = d_zero(dm, kept);
    double mc = find_maximal_crack(dm, kept).value;
    std::size_t rounds = 1;
    // Ratios are r_start + step * r_step; the last one is clamped to r_max.
    while (!(mc > params.t * d0) && r < params.r_max - 1e-12) {
        ++step;
        r = std::min(params.r_start + static_cast<double>(step) * params.r_step, params.r_max);
        std::tie(kept, removed) = split_at(r);
        d0 = d_zero(dm, kept);
        mc = find_maximal_crack(dm, kept).value;
        ++rounds;
    }
    return {std::move(kept), std::move(removed), r, mc, d0, mc > params.t * d0, rounds};
}

inline DenoiseResult denoise(const DistanceMatrix& dm, const FcParams& params) {
    if (dm.size() < 5) throw ValidationError("denoising needs at least 5 points");
    params.validate(dm.size());
    return denoise(dm, knn_density(dm, params.n0.resolve(dm.size())), params);
}

// ============================================================================
// Reattaching removed points
// ============================================================================

/// Extends a partition of `dense` to every point. Repeatedly takes the closest
/// (classified, unclassified) pair, lowest indices on ties, and gives the
/// unclassified point its partner's label. `partial.labels` is indexed by
/// position in `dense`.
inline Partition assign_remainder(const DistanceMatrix& dm, const Partition& partial, const Subset& dense,
                                  std::span<const Index> removed) {
    dense.check_against(dm);
    const std::size_t n = dm.size();
    if (partial.labels.size() != dense.size()) throw ValidationError("partial partition does not match dense subset");
    std::vector<int> labels(n, -1);
    for (std::size_t p = 0; p < dense.size(); ++p) labels[dense[p]] = partial.labels[p];
    for (Index u : removed) {
        if (u >= n) throw ValidationError("removed index out of range");
        if (labels[u] != -1) throw ValidationError("removed set overlaps the classified set");
        labels[u] = -2;
    }
    if (std::find(labels.begin(), labels.end(), -1) != labels.end())
        throw ValidationError("dense subset and removed set must cover every point");

    Partition out = partial;
    if (removed.empty()) {
        out.labels = std::move(labels);
        return out;
    }

    // For each unclassified point, its closest classified point (lowest index on ties).
    std::vector<Index> pending(removed.begin(), removed.end());
    std::sort(pending.begin(), pending.end());
    std::vector<double> best_d(pending.size(), std::numeric_limits<double>::infinity());
    std::vector<Index> best_c(pending.size(), 0);
    parallel::for_each_block(pending.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto row = dm.row(pending[p]);
            for (Index c : dense) {
                if (row[c] < best_d[p]) {
                    best_d[p] = row[c];
                    best_c[p] = c;
                }
            }
        }
    });

    while (!pending.empty()) {
        std::size_t pick = 0;
        for (std::size_t p = 1; p < pending.size(); ++p) {
            if (best_d[p] < best_d[pick] || (best_d[p] == best_d[pick] && best_c[p] < best_c[pick])) pick = p;
        }
        const Index u = pending[pick];
        labels[u] = labels[best_c[pick]];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
        best_d.erase(best_d.begin() + static_cast<std::ptrdiff_t>(pick));
        best_c.erase(best_c.begin() + static_cast<std::ptrdiff_t>(pick));
        const auto row = dm.row(u);
        for (std::size_t p = 0; p < pending.size(); ++p) {
            const double d = row[pending[p]];
            if (d < best_d[p] || (d == best_d[p] && u < best_c[p])) {
                best_d[p] = d;
                best_c[p] = u;
            }
        }
    }
    out.labels = std::move(labels);
    return out;
}

// ============================================================================
// FC-KNN pipeline
// ============================================================================

/// Fission on the dense subset followed by reattachment of the removed points.
inline Partition cluster_denoised(const DistanceMatrix& dm, const DenoiseResult& dn, const FcParams& params) {
    FissionOptions options{params.threshold_mode, std::nullopt};
    if (params.dense_stop == DenseStop::t_times_d0) options.stop_threshold = params.t * dn.d0_final;
    const Partition dense = fission_cluster(dm, dn.dense_subset, options);
    return assign_remainder(dm, dense, dn.dense_subset, dn.removed);
}

struct FcKnnResult {
    Partition partition;
    DenoiseResult denoise;
    std::size_t n0 = 0;
    std::vector<std::string> warnings;
};

/// Denoise, split the dense subset by fission (stop threshold set by
/// `params.dense_stop`), then attach the removed points to their nearest clusters.
inline FcKnnResult fc_knn(const DistanceMatrix& dm, const FcParams& params) {
    const std::size_t n = dm.size();
    if (n < 5) throw ValidationError("fc-knn needs at least 5 points");
    params.validate(n);
    const std::size_t n0 = params.n0.resolve(n);
    DenoiseResult dn = denoise(dm, knn_density(dm, n0), params);
    FcKnnResult result{{}, dn, n0, {}};
    if (!dn.separated)
        result.warnings.push_back("denoising reached r = " + io::format_double(dn.r_final) +
                                  " without MC > t*d0; clustering the remaining subset anyway");
    result.partition = cluster_denoised(dm, dn, params);
    return result;
}

} // namespace fission
