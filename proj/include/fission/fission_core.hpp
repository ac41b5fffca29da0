#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fission/error.hpp"
#include "fission/metric_space.hpp"
#include "fission/parallel.hpp"

namespace fission {

// ============================================================================
// Subset
// ============================================================================

/// Nonempty, strictly ascending list of point indices.
class Subset {
public:
    explicit Subset(std::vector<Index> indices) : indices_(std::move(indices)) {
        if (indices_.empty()) throw ValidationError("subset must not be empty");
        for (std::size_t i = 1; i < indices_.size(); ++i)
            if (indices_[i - 1] >= indices_[i])
                throw ValidationError("subset indices must be strictly ascending");
    }

    static Subset all(std::size_t n) {
        std::vector<Index> idx(n);
        std::iota(idx.begin(), idx.end(), Index{0});
        return Subset(std::move(idx));
    }

    std::size_t size() const { return indices_.size(); }
    Index operator[](std::size_t pos) const { return indices_[pos]; }
    Index front() const { return indices_.front(); }
    auto begin() const { return indices_.begin(); }
    auto end() const { return indices_.end(); }
    const std::vector<Index>& indices() const { return indices_; }

    bool contains(Index i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

    void check_against(const DistanceMatrix& dm) const {
        if (indices_.back() >= dm.size()) throw ValidationError("subset index out of range for distance matrix");
    }

    friend bool operator==(const Subset&, const Subset&) = default;

private:
    std::vector<Index> indices_;
};

// ============================================================================
// Gap table (sorted rows and adjacent differences)
// ============================================================================

/// Row i describes the i-th member of the subset: its distances to every
/// member, sorted ascending (self-distance included), and the gaps between
/// consecutive sorted distances.
struct GapTable {
    std::vector<Index> members;
    std::vector<double> sorted; ///< m x m, row-major
    std::vector<double> gaps;   ///< m x (m-1), row-major
    std::vector<Index> order;   ///< m x m, point index at each sorted position

    std::size_t size() const { return members.size(); }
    std::span<const double> sorted_row(std::size_t i) const { return {sorted.data() + i * size(), size()}; }
    std::span<const double> gap_row(std::size_t i) const {
        const std::size_t w = size() - 1;
        return {gaps.data() + i * w, w};
    }
    std::span<const Index> order_row(std::size_t i) const { return {order.data() + i * size(), size()}; }
};

/// Ties in a row are ordered by point index.
inline GapTable gap_table(const DistanceMatrix& dm, const Subset& sub) {
    sub.check_against(dm);
    const std::size_t m = sub.size();
    GapTable gt;
    gt.members = sub.indices();
    gt.sorted.resize(m * m);
    gt.gaps.resize(m * (m - 1));
    gt.order.resize(m * m);
    parallel::for_each_block(m, [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, Index>> row(m);
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j < m; ++j) row[j] = {dm(sub[i], sub[j]), sub[j]};
            std::sort(row.begin(), row.end());
            for (std::size_t j = 0; j < m; ++j) {
                gt.sorted[i * m + j] = row[j].first;
                gt.order[i * m + j] = row[j].second;
            }
            for (std::size_t j = 0; j + 1 < m; ++j) gt.gaps[i * (m - 1) + j] = row[j + 1].first - row[j].first;
        }
    });
    return gt;
}

// ============================================================================
// Maximal crack
// ============================================================================

/// A crack seen from reference point `row`: sorted distances `threshold` and
/// `threshold + value` are adjacent, with nothing strictly between them.
struct CrackLocation {
    Index row = 0;         ///< reference point (dataset index)
    std::size_t low = 0;   ///< sorted position of the lower distance
    double value = 0.0;    ///< crack size (MC when maximal)
    double threshold = 0.0;

    friend bool operator==(const CrackLocation&, const CrackLocation&) = default;
};

/// Relative slack when testing a crack against a stop threshold. A crack is the
/// difference of two rounded distances; where it equals d0 in exact arithmetic
/// (every connected 1-D set, many Manhattan sets) the computed value lands a few
/// ulps either side, and an exact comparison would split on rounding noise.
inline constexpr double kCrackRelativeSlack = 1e-12;

/// True when `crack` exceeds `threshold` by more than rounding noise, measured
/// against the upper distance of the crack.
inline bool crack_exceeds(const CrackLocation& crack, double threshold) {
    return crack.value - threshold > kCrackRelativeSlack * (crack.threshold + crack.value);
}

/// Largest gap in the table. Ties go to the lowest row, then lowest position.
inline CrackLocation maximal_crack(const GapTable& gt) {
    if (gt.size() < 2) throw ValidationError("no crack defined for a subset of fewer than 2 points");
    CrackLocation best;
    bool found = false;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const auto gaps = gt.gap_row(i);
        for (std::size_t k = 0; k < gaps.size(); ++k) {
            if (!found || gaps[k] > best.value) {
                best = {gt.members[i], k, gaps[k], gt.sorted_row(i)[k]};
                found = true;
            }
        }
    }
    return best;
}

namespace detail {

struct RowGap {
    double value = 0.0;
    double low = 0.0; ///< lower endpoint; the smallest one among equal maximal gaps
};

struct GapScratch {
    std::vector<double> bucket_min, bucket_max, intra_max, sorted_tmp;
    std::vector<std::size_t> bucket_of, bucket_count;
    std::vector<char> flagged;
};

inline RowGap max_gap_by_sorting(std::span<const double> values, std::vector<double>& tmp) {
    tmp.assign(values.begin(), values.end());
    std::sort(tmp.begin(), tmp.end());
    RowGap best{tmp[1] - tmp[0], tmp[0]};
    for (std::size_t k = 1; k + 1 < tmp.size(); ++k) {
        const double g = tmp[k + 1] - tmp[k];
        if (g > best.value) best = {g, tmp[k]};
    }
    return best;
}

/// Maximum adjacent gap of `values` in sorted order without sorting them:
/// m values go into m-1 equal-width buckets, so the largest gap is at least
/// one bucket wide. Bucket assignment is monotone in the value, which makes
/// every gap between consecutive nonempty buckets a true adjacent gap; the
/// rare buckets wide enough to hide an equal or larger gap are sorted
/// explicitly. The result is bit-identical to scanning a fully sorted row.
inline RowGap max_adjacent_gap(std::span<const double> values, GapScratch& s) {
    const std::size_t m = values.size();
    if (m <= 32) return max_gap_by_sorting(values, s.sorted_tmp);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) return {0.0, lo};

    const std::size_t nb = m - 1;
    const double range = hi - lo;
    const double scale = static_cast<double>(nb);
    constexpr double inf = std::numeric_limits<double>::infinity();
    s.bucket_min.assign(nb, inf);
    s.bucket_max.assign(nb, -inf);
    s.bucket_count.assign(nb, 0);
    s.bucket_of.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double v = values[i];
        const std::size_t b = std::min(nb - 1, static_cast<std::size_t>((v - lo) / range * scale));
        s.bucket_of[i] = b;
        s.bucket_min[b] = std::min(s.bucket_min[b], v);
        s.bucket_max[b] = std::max(s.bucket_max[b], v);
        ++s.bucket_count[b];
    }

    double best = 0.0;
    bool have_prev = false;
    double prev_max = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        if (s.bucket_count[b] == 0) continue;
        if (have_prev) best = std::max(best, s.bucket_min[b] - prev_max);
        prev_max = s.bucket_max[b];
        have_prev = true;
    }

    // Buckets whose span reaches `best` may hold an internal gap that ties or beats it.
    s.flagged.assign(nb, 0);
    s.intra_max.assign(nb, 0.0);
    bool any_flagged = false;
    for (std::size_t b = 0; b < nb; ++b) {
        if (s.bucket_count[b] >= 2 && s.bucket_max[b] - s.bucket_min[b] >= best) {
            s.flagged[b] = 1;
            any_flagged = true;
        }
    }
    std::vector<std::vector<double>> contents;
    std::vector<std::size_t> slot;
    if (any_flagged) {
        slot.assign(nb, 0);
        for (std::size_t b = 0; b < nb; ++b)
            if (s.flagged[b]) {
                slot[b] = contents.size();
                contents.emplace_back();
                contents.back().reserve(s.bucket_count[b]);
            }
        for (std::size_t i = 0; i < m; ++i)
            if (s.flagged[s.bucket_of[i]]) contents[slot[s.bucket_of[i]]].push_back(values[i]);
        for (std::size_t b = 0; b < nb; ++b) {
            if (!s.flagged[b]) continue;
            auto& c = contents[slot[b]];
            std::sort(c.begin(), c.end());
            double g = 0.0;
            for (std::size_t k = 0; k + 1 < c.size(); ++k) g = std::max(g, c[k + 1] - c[k]);
            s.intra_max[b] = g;
            best = std::max(best, g);
        }
    }

    // Walk in ascending order and return the first gap equal to the maximum.
    have_prev = false;
    for (std::size_t b = 0; b < nb; ++b) {
        if (s.bucket_count[b] == 0) continue;
        if (have_prev && s.bucket_min[b] - prev_max == best) return {best, prev_max};
        if (s.flagged[b] && s.intra_max[b] == best) {
            const auto& c = contents[slot[b]];
            for (std::size_t k = 0; k + 1 < c.size(); ++k)
                if (c[k + 1] - c[k] == best) return {best, c[k]};
        }
        prev_max = s.bucket_max[b];
        have_prev = true;
    }
    return {best, prev_max}; // unreachable: the maximum is always attained above
}

} // namespace detail

/// Same result as maximal_crack(gap_table(dm, sub)) in O(m^2) time and O(m)
/// memory per worker. This is the kernel the fission loop runs on.
inline CrackLocation find_maximal_crack(const DistanceMatrix& dm, const Subset& sub) {
    sub.check_against(dm);
    const std::size_t m = sub.size();
    if (m < 2) throw ValidationError("no crack defined for a subset of fewer than 2 points");
    std::vector<detail::RowGap> per_row(m);
    parallel::for_each_block(
        m,
        [&](std::size_t begin, std::size_t end) {
            detail::GapScratch scratch;
            std::vector<double> row(m);
            for (std::size_t i = begin; i < end; ++i) {
                const auto full = dm.row(sub[i]);
                for (std::size_t j = 0; j < m; ++j) row[j] = full[sub[j]];
                per_row[i] = detail::max_adjacent_gap(row, scratch);
            }
        },
        16);
    std::size_t best_row = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (per_row[i].value > per_row[best_row].value) best_row = i;

    const detail::RowGap& g = per_row[best_row];
    const auto full = dm.row(sub[best_row]);
    std::size_t low = 0;
    if (g.value > 0.0) {
        std::size_t at_or_below = 0;
        for (Index j : sub)
            if (full[j] <= g.low) ++at_or_below;
        low = at_or_below - 1;
    }
    return {sub[best_row], low, g.value, g.low};
}

// ============================================================================
// Splitting
// ============================================================================

/// Points within `threshold` of the crack's reference point go first, the rest second.
inline std::pair<Subset, Subset> split_at_crack(const Subset& sub, const DistanceMatrix& dm, const CrackLocation& cl) {
    sub.check_against(dm);
    if (!sub.contains(cl.row)) throw ValidationError("crack reference point is not in the subset");
    const auto ref = dm.row(cl.row);
    bool threshold_seen = false;
    double next_above = std::numeric_limits<double>::infinity();
    std::vector<Index> near, far;
    for (Index j : sub) {
        const double d = ref[j];
        if (d == cl.threshold) threshold_seen = true;
        if (d <= cl.threshold) {
            near.push_back(j);
        } else {
            far.push_back(j);
            next_above = std::min(next_above, d);
        }
    }
    if (!threshold_seen || far.empty() || next_above - cl.threshold != cl.value)
        throw ValidationError("crack location is inconsistent with the distance matrix");
    return {Subset(std::move(near)), Subset(std::move(far))};
}

/// Largest nearest-neighbour distance within the subset.
inline double d_zero(const DistanceMatrix& dm, const Subset& sub) {
    sub.check_against(dm);
    if (sub.size() < 2) throw ValidationError("d0 needs at least 2 points");
    const std::size_t m = sub.size();
    std::vector<double> nearest(m);
    parallel::for_each_block(m, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto row = dm.row(sub[i]);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j)
                if (j != i) best = std::min(best, row[sub[j]]);
            nearest[i] = best;
        }
    });
    return *std::max_element(nearest.begin(), nearest.end());
}

// ============================================================================
// Fission clustering
// ============================================================================

enum class ThresholdMode {
    global,     ///< d0 of the whole input, computed once before splitting
    per_subset, ///< d0 of each subset being tested
};

inline std::string to_string(ThresholdMode mode) { return mode == ThresholdMode::global ? "global" : "per-subset"; }

inline ThresholdMode parse_threshold_mode(std::string_view text) {
    if (text == "global") return ThresholdMode::global;
    if (text == "per-subset") return ThresholdMode::per_subset;
    throw ValidationError("unknown threshold mode '" + std::string(text) + "' (expected global or per-subset)");
}

struct FissionOptions {
    ThresholdMode mode = ThresholdMode::global;
    /// Explicit stop threshold; overrides `mode` when set.
    std::optional<double> stop_threshold;
};

struct SplitRecord {
    std::size_t subset_size = 0;
    double mc = 0.0;
    double d0_reference = 0.0;
    Index crack_row = 0;
    double crack_threshold = 0.0;
    std::size_t first_size = 0;
    std::size_t second_size = 0;
};

/// Cluster ids are 0..k-1, numbered by each cluster's smallest member.
struct Partition {
    std::vector<int> labels;
    int k = 0;
    std::vector<SplitRecord> split_trace;
    std::optional<double> stop_threshold; ///< set in global/explicit mode
};

/// Recursively splits `root` at maximal cracks until every subset satisfies
/// MC <= stop threshold (up to `kCrackRelativeSlack`) or has fewer than 2
/// points. Labels are indexed by position in `root`.
inline Partition fission_cluster(const DistanceMatrix& dm, const Subset& root, const FissionOptions& options = {}) {
    root.check_against(dm);
    const std::size_t n = root.size();
    Partition result;
    if (options.stop_threshold) {
        if (!(*options.stop_threshold >= 0.0)) throw ValidationError("stop threshold must be >= 0");
        result.stop_threshold = options.stop_threshold;
    } else if (options.mode == ThresholdMode::global && n >= 2) {
        result.stop_threshold = d_zero(dm, root);
    }

    struct Live {
        Subset members;
        std::optional<CrackLocation> crack;
        double threshold = 0.0;
        bool splittable() const { return crack && crack_exceeds(*crack, threshold); }
    };
    auto make_live = [&](Subset s) {
        Live live{std::move(s), std::nullopt, 0.0};
        if (live.members.size() >= 2) {
            live.crack = find_maximal_crack(dm, live.members);
            live.threshold = result.stop_threshold ? *result.stop_threshold : d_zero(dm, live.members);
        }
        return live;
    };

    std::vector<Live> live;
    live.push_back(make_live(root));
    const std::size_t max_splits = n == 0 ? 0 : n - 1;
    while (true) {
        std::optional<std::size_t> pick;
        for (std::size_t i = 0; i < live.size(); ++i) {
            if (!live[i].splittable()) continue;
            if (!pick) {
                pick = i;
                continue;
            }
            const Live& cur = live[*pick];
            const Live& cand = live[i];
            if (cand.members.size() > cur.members.size() ||
                (cand.members.size() == cur.members.size() && cand.members.front() < cur.members.front()))
                pick = i;
        }
        if (!pick) break;
        if (result.split_trace.size() >= max_splits) throw AlgorithmError("fission did not terminate");

        Live chosen = std::move(live[*pick]);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(*pick));
        auto [first, second] = split_at_crack(chosen.members, dm, *chosen.crack);
        result.split_trace.push_back({chosen.members.size(), chosen.crack->value, chosen.threshold, chosen.crack->row,
                                      chosen.crack->threshold, first.size(), second.size()});
        live.push_back(make_live(std::move(first)));
        live.push_back(make_live(std::move(second)));
    }

    std::sort(live.begin(), live.end(),
              [](const Live& a, const Live& b) { return a.members.front() < b.members.front(); });
    result.k = static_cast<int>(live.size());
    result.labels.assign(n, -1);
    for (std::size_t c = 0; c < live.size(); ++c) {
        for (Index idx : live[c].members) {
            const auto pos = static_cast<std::size_t>(
                std::lower_bound(root.begin(), root.end(), idx) - root.begin());
            result.labels[pos] = static_cast<int>(c);
        }
    }
    return result;
}

/// Fission clustering of the whole matrix.
inline Partition fission_cluster(const DistanceMatrix& dm, const FissionOptions& options = {}) {
    return fission_cluster(dm, Subset::all(dm.size()), options);
}

} // namespace fission
