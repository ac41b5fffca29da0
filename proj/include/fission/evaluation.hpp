#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "fission/error.hpp"

namespace fission {

struct EvalReport {
    double accuracy = 0.0;
    double f_score = 0.0;
    int predicted_k = 0;
    int true_k = 0;
    std::map<int, int> matching; ///< predicted cluster id -> true class id
};

namespace detail {

/// Maps arbitrary ids to 0..c-1 in ascending id order.
struct DenseIds {
    std::vector<int> ids;   // dense id per point
    std::vector<int> names; // original id per dense id
};

inline DenseIds densify(std::span<const int> raw) {
    DenseIds out;
    out.names.assign(raw.begin(), raw.end());
    std::sort(out.names.begin(), out.names.end());
    out.names.erase(std::unique(out.names.begin(), out.names.end()), out.names.end());
    out.ids.reserve(raw.size());
    for (int v : raw)
        out.ids.push_back(static_cast<int>(std::lower_bound(out.names.begin(), out.names.end(), v) - out.names.begin()));
    return out;
}

struct Contingency {
    DenseIds pred, truth;
    std::vector<std::vector<std::int64_t>> counts; // [cluster][class]
};

inline Contingency contingency(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) throw ValidationError("prediction and ground truth lengths differ");
    if (pred.empty()) throw ValidationError("cannot evaluate an empty labelling");
    Contingency c{densify(pred), densify(truth), {}};
    c.counts.assign(c.pred.names.size(), std::vector<std::int64_t>(c.truth.names.size(), 0));
    for (std::size_t i = 0; i < pred.size(); ++i) ++c.counts[c.pred.ids[i]][c.truth.ids[i]];
    return c;
}

/// Hungarian algorithm (potentials, O(n^3)) minimising `cost` on a square
/// matrix. Returns the column assigned to each row.
inline std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
    const std::size_t n = cost.size();
    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<std::int64_t> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            std::int64_t delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= n; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

} // namespace detail

struct AccuracyResult {
    double accuracy = 0.0;
    std::map<int, int> matching;
};

/// Fraction of points covered by the best one-to-one cluster/class matching.
inline AccuracyResult accuracy(std::span<const int> pred, std::span<const int> truth) {
    const auto c = detail::contingency(pred, truth);
    const std::size_t kp = c.pred.names.size(), kt = c.truth.names.size();
    const std::size_t size = std::max(kp, kt);
    std::vector<std::vector<std::int64_t>> cost(size, std::vector<std::int64_t>(size, 0));
    for (std::size_t i = 0; i < kp; ++i)
        for (std::size_t j = 0; j < kt; ++j) cost[i][j] = -c.counts[i][j];
    const auto assignment = detail::min_cost_assignment(cost);
    AccuracyResult out;
    std::int64_t hits = 0;
    for (std::size_t i = 0; i < kp; ++i) {
        const std::size_t j = assignment[i];
        if (j < kt && c.counts[i][j] > 0) {
            hits += c.counts[i][j];
            out.matching[c.pred.names[i]] = c.truth.names[j];
        }
    }
    out.accuracy = static_cast<double>(hits) / static_cast<double>(pred.size());
    return out;
}

/// Class-weighted best-match F-measure: sum over classes of
/// (class size / n) * max over clusters of F(cluster, class).
inline double f_score(std::span<const int> pred, std::span<const int> truth) {
    const auto c = detail::contingency(pred, truth);
    const std::size_t kp = c.pred.names.size(), kt = c.truth.names.size();
    std::vector<std::int64_t> cluster_size(kp, 0), class_size(kt, 0);
    for (std::size_t i = 0; i < kp; ++i)
        for (std::size_t j = 0; j < kt; ++j) {
            cluster_size[i] += c.counts[i][j];
            class_size[j] += c.counts[i][j];
        }
    double total = 0.0;
    for (std::size_t j = 0; j < kt; ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < kp; ++i) {
            const auto overlap = static_cast<double>(c.counts[i][j]);
            if (overlap == 0.0) continue;
            const double precision = overlap / static_cast<double>(cluster_size[i]);
            const double recall = overlap / static_cast<double>(class_size[j]);
            best = std::max(best, 2.0 * precision * recall / (precision + recall));
        }
        total += static_cast<double>(class_size[j]) / static_cast<double>(pred.size()) * best;
    }
    return total;
}

inline EvalReport evaluate(std::span<const int> pred, std::span<const int> truth) {
    auto acc = accuracy(pred, truth);
    EvalReport r;
    r.accuracy = acc.accuracy;
    r.matching = std::move(acc.matching);
    r.f_score = f_score(pred, truth);
    r.predicted_k = static_cast<int>(detail::densify(pred).names.size());
    r.true_k = static_cast<int>(detail::densify(truth).names.size());
    return r;
}

} // namespace fission
