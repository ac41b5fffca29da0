#pragma once

// Slow, obviously-correct reference implementations used only by tests. None
// of these share code with the library beyond the DistanceMatrix container.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

#include "fission/metric_space.hpp"
#include "fission/random.hpp"

namespace oracle {

using fission::DistanceMatrix;
using fission::Index;

inline double manhattan(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    return s;
}

struct Crack {
    Index row = 0;
    std::size_t low = 0;
    double value = -1.0;
    double threshold = 0.0;
};

/// Every (row, adjacent pair) of every sorted distance multiset; each candidate
/// is checked against the crack definition by scanning the row for a distance
/// strictly inside the open interval.
inline Crack max_crack(const DistanceMatrix& dm, const std::vector<Index>& sub) {
    Crack best;
    for (Index x : sub) {
        std::multiset<double> row;
        for (Index y : sub) row.insert(dm(x, y));
        std::vector<double> sorted(row.begin(), row.end());
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
            const double lo = sorted[k], hi = sorted[k + 1];
            bool empty_interior = true;
            for (Index y : sub)
                if (dm(x, y) > lo && dm(x, y) < hi) empty_interior = false;
            if (!empty_interior) continue;
            if (hi - lo > best.value) best = {x, k, hi - lo, lo};
        }
    }
    return best;
}

inline double d_zero(const DistanceMatrix& dm, const std::vector<Index>& sub) {
    double worst = 0.0;
    for (Index x : sub) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Index y : sub)
            if (y != x) nearest = std::min(nearest, dm(x, y));
        worst = std::max(worst, nearest);
    }
    return worst;
}

/// Connectivity of the graph with edges where distance <= threshold.
inline bool threshold_connected(const DistanceMatrix& dm, const std::vector<Index>& sub, double threshold) {
    std::vector<char> seen(sub.size(), 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
        const std::size_t a = q.front();
        q.pop();
        for (std::size_t b = 0; b < sub.size(); ++b) {
            if (!seen[b] && dm(sub[a], sub[b]) <= threshold) {
                seen[b] = 1;
                ++reached;
                q.push(b);
            }
        }
    }
    return reached == sub.size();
}

/// 1 / sum of the n0 smallest distances to other points (fully sorted row).
inline double knn_rho(const DistanceMatrix& dm, Index i, std::size_t n0) {
    std::vector<double> others;
    for (Index j = 0; j < dm.size(); ++j)
        if (j != i) others.push_back(dm(i, j));
    std::sort(others.begin(), others.end());
    double s = 0.0;
    for (std::size_t k = 0; k < n0; ++k) s += others[k];
    return s > 0.0 ? 1.0 / s : std::numeric_limits<double>::infinity();
}

/// Best accuracy over every injective map from clusters to classes.
inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    const int kp = *std::max_element(pred.begin(), pred.end()) + 1;
    const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
    const int width = std::max(kp, kt);
    std::vector<int> perm(static_cast<std::size_t>(width));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            if (perm[static_cast<std::size_t>(pred[i])] == truth[i]) ++hits;
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

/// Class-size weighted maximum F over clusters.
inline double f_score(const std::vector<int>& pred, const std::vector<int>& truth) {
    const int kp = *std::max_element(pred.begin(), pred.end()) + 1;
    const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
    double total = 0.0;
    for (int c = 0; c < kt; ++c) {
        double class_size = 0.0;
        for (int t : truth) class_size += t == c;
        double best = 0.0;
        for (int p = 0; p < kp; ++p) {
            double both = 0.0, cluster_size = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                cluster_size += pred[i] == p;
                both += pred[i] == p && truth[i] == c;
            }
            if (both == 0.0) continue;
            const double precision = both / cluster_size, recall = both / class_size;
            best = std::max(best, 2.0 * precision * recall / (precision + recall));
        }
        total += class_size * best;
    }
    return total / static_cast<double>(pred.size());
}

/// Relabels so clusters are numbered by first appearance.
inline std::vector<int> canonical(const std::vector<int>& labels) {
    std::vector<int> map;
    std::vector<int> out;
    for (int l : labels) {
        if (static_cast<std::size_t>(l) >= map.size()) map.resize(static_cast<std::size_t>(l) + 1, -1);
        if (map[static_cast<std::size_t>(l)] < 0)
            map[static_cast<std::size_t>(l)] = static_cast<int>(std::count_if(map.begin(), map.end(), [](int v) { return v >= 0; }));
        out.push_back(map[static_cast<std::size_t>(l)]);
    }
    return out;
}

inline fission::Dataset random_dataset(fission::Rng& rng, std::size_t n, std::size_t d, double scale = 10.0) {
    std::vector<double> coords(n * d);
    for (double& c : coords) c = rng.uniform(0.0, scale);
    return fission::Dataset(std::move(coords), d);
}

/// Coordinates on a small integer grid, so many distances tie exactly.
inline fission::Dataset tie_heavy_dataset(fission::Rng& rng, std::size_t n, std::size_t d) {
    std::vector<double> coords(n * d);
    for (double& c : coords) c = static_cast<double>(rng.below(4));
    return fission::Dataset(std::move(coords), d);
}

} // namespace oracle
