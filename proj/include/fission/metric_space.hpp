#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fission/error.hpp"
#include "fission/io.hpp"
#include "fission/parallel.hpp"
#include "fission/random.hpp"

namespace fission {

using Index = std::size_t;

// ============================================================================
// Metric
// ============================================================================

struct Metric {
    enum class Kind { euclidean, manhattan, minkowski };

    Kind kind = Kind::euclidean;
    double p = 2.0; ///< exponent, minkowski only

    static Metric euclidean() { return {Kind::euclidean, 2.0}; }
    static Metric manhattan() { return {Kind::manhattan, 1.0}; }
    static Metric minkowski(double p) {
        if (!(p > 0.0) || !std::isfinite(p))
            throw ValidationError("minkowski exponent must be a finite value > 0");
        return {Kind::minkowski, p};
    }

    /// Parses "euclidean", "manhattan" or "minkowski:<p>".
    static Metric parse(std::string_view text) {
        if (text == "euclidean") return euclidean();
        if (text == "manhattan") return manhattan();
        constexpr std::string_view prefix = "minkowski:";
        if (text.starts_with(prefix)) {
            const std::string exponent(text.substr(prefix.size()));
            std::size_t used = 0;
            double p = 0.0;
            try {
                p = std::stod(exponent, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != exponent.size())
                throw ValidationError("bad minkowski exponent in metric '" + std::string(text) + "'");
            return minkowski(p);
        }
        throw ValidationError("unknown metric '" + std::string(text) +
                              "' (expected euclidean, manhattan or minkowski:<p>)");
    }

    std::string tag() const {
        switch (kind) {
        case Kind::euclidean: return "euclidean";
        case Kind::manhattan: return "manhattan";
        case Kind::minkowski: return "minkowski:" + io::format_double(p);
        }
        return "unknown";
    }

    /// False for minkowski with p < 1, where the triangle inequality can fail.
    bool is_true_metric() const { return kind != Kind::minkowski || p >= 1.0; }

    friend bool operator==(const Metric&, const Metric&) = default;
};

namespace detail {

// Coordinates are visited in index order; |a-b| == |b-a| bit-for-bit, so the
// result is exactly symmetric in its arguments.
inline double distance_unchecked(std::span<const double> a, std::span<const double> b, const Metric& m) {
    double acc = 0.0;
    switch (m.kind) {
    case Metric::Kind::euclidean:
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double diff = a[i] - b[i];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    case Metric::Kind::manhattan:
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
        return acc;
    case Metric::Kind::minkowski:
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), m.p);
        return std::pow(acc, 1.0 / m.p);
    }
    return acc;
}

} // namespace detail

inline double distance(std::span<const double> a, std::span<const double> b, const Metric& m) {
    if (a.size() != b.size())
        throw ValidationError("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) throw ValidationError("non-finite coordinate");
    const double d = detail::distance_unchecked(a, b, m);
    if (!std::isfinite(d)) throw ValidationError("distance overflowed to a non-finite value");
    return d;
}

// ============================================================================
// Dataset
// ============================================================================

/// n points in R^d, row-major, with optional ground-truth class ids 0..c-1.
class Dataset {
public:
    Dataset(std::vector<double> coordinates, std::size_t dims, std::optional<std::vector<int>> labels = std::nullopt,
            std::string name = {})
        : coords_(std::move(coordinates)), dims_(dims), labels_(std::move(labels)), name_(std::move(name)) {
        if (dims_ == 0) throw ValidationError("dataset needs at least one dimension");
        if (coords_.empty()) throw ValidationError("dataset needs at least one point");
        if (coords_.size() % dims_ != 0)
            throw ValidationError("coordinate count is not a multiple of the dimension");
        for (double v : coords_)
            if (!std::isfinite(v)) throw ValidationError("dataset contains a non-finite coordinate");
        if (labels_) {
            if (labels_->size() != size()) throw ValidationError("label count does not match point count");
            const std::set<int> distinct(labels_->begin(), labels_->end());
            if (*distinct.begin() != 0 || *distinct.rbegin() != static_cast<int>(distinct.size()) - 1)
                throw ValidationError("class ids must be contiguous starting at 0");
        }
    }

    std::size_t size() const { return coords_.size() / dims_; }
    std::size_t dims() const { return dims_; }
    std::span<const double> point(Index i) const { return {coords_.data() + i * dims_, dims_}; }
    const std::vector<double>& coordinates() const { return coords_; }
    const std::optional<std::vector<int>>& labels() const { return labels_; }
    const std::string& name() const { return name_; }

    std::size_t class_count() const {
        if (!labels_) return 0;
        return static_cast<std::size_t>(*std::max_element(labels_->begin(), labels_->end())) + 1;
    }

private:
    std::vector<double> coords_;
    std::size_t dims_;
    std::optional<std::vector<int>> labels_;
    std::string name_;
};

// ============================================================================
// DistanceMatrix
// ============================================================================

/// Dense symmetric n x n matrix, zero diagonal, finite nonnegative entries.
class DistanceMatrix {
public:
    /// Validates every invariant; use for matrices that did not come from distance_matrix().
    static DistanceMatrix from_values(std::size_t n, std::vector<double> values, std::string metric_tag = "custom") {
        if (n == 0) throw ValidationError("distance matrix must have at least one row");
        if (values.size() != n * n) throw ValidationError("distance matrix value count is not n*n");
        for (std::size_t i = 0; i < n; ++i) {
            if (values[i * n + i] != 0.0) throw ValidationError("distance matrix diagonal must be zero");
            for (std::size_t j = 0; j < n; ++j) {
                const double v = values[i * n + j];
                if (!std::isfinite(v) || v < 0.0)
                    throw ValidationError("distance matrix entries must be finite and nonnegative");
                if (v != values[j * n + i]) throw ValidationError("distance matrix must be symmetric");
            }
        }
        return DistanceMatrix(n, std::move(values), std::move(metric_tag));
    }

    std::size_t size() const { return n_; }
    double operator()(Index i, Index j) const { return values_[i * n_ + j]; }
    std::span<const double> row(Index i) const { return {values_.data() + i * n_, n_}; }
    const std::vector<double>& values() const { return values_; }
    const std::string& metric_tag() const { return tag_; }

private:
    DistanceMatrix(std::size_t n, std::vector<double> values, std::string tag)
        : n_(n), values_(std::move(values)), tag_(std::move(tag)) {}

    friend DistanceMatrix distance_matrix(const Dataset&, const Metric&, std::size_t);

    std::size_t n_;
    std::vector<double> values_;
    std::string tag_;
};

inline constexpr std::size_t kDefaultMaxMatrixEntries = 100'000'000;

/// Pairwise distances. Refuses datasets whose n^2 entries exceed `max_entries`.
/// Rows are filled in parallel; each entry is computed once, so the result is
/// bit-identical for any thread count.
inline DistanceMatrix distance_matrix(const Dataset& ds, const Metric& m,
                                      std::size_t max_entries = kDefaultMaxMatrixEntries) {
    const std::size_t n = ds.size();
    if (n > max_entries / n)
        throw ValidationError("dataset of " + std::to_string(n) + " points exceeds the distance matrix cap of " +
                              std::to_string(max_entries) + " entries");
    std::vector<double> values(n * n, 0.0);
    parallel::for_each_block(
        n,
        [&](std::size_t begin, std::size_t end) {
            for (Index i = begin; i < end; ++i) {
                const auto a = ds.point(i);
                for (Index j = i + 1; j < n; ++j) {
                    const double d = detail::distance_unchecked(a, ds.point(j), m);
                    if (!std::isfinite(d)) throw ValidationError("distance overflowed to a non-finite value");
                    values[i * n + j] = d;
                    values[j * n + i] = d;
                }
            }
        },
        16);
    return DistanceMatrix(n, std::move(values), m.tag());
}

// ============================================================================
// Triangle inequality validation
// ============================================================================

struct TriangleReport {
    bool pass = true;
    double worst_violation = 0.0; ///< max of d(i,k) - d(i,j) - d(j,k), 0 when none
    std::array<Index, 3> worst_triple{};
    std::size_t triples_checked = 0;
    bool exhaustive = false;
    /// Set when the generating metric is minkowski with p < 1.
    bool metric_guarantee_lapsed = false;
};

inline constexpr double kTriangleTolerance = 1e-9;

/// Checks d(i,k) <= d(i,j) + d(j,k) + 1e-9 on `samples` random triples of
/// distinct indices, or on every ordered triple when there are no more than
/// `samples` of them.
inline TriangleReport validate_triangle(const DistanceMatrix& dm, std::size_t samples, std::uint64_t seed = 0) {
    TriangleReport report;
    const std::string& tag = dm.metric_tag();
    if (tag.starts_with("minkowski:")) {
        try {
            report.metric_guarantee_lapsed = !Metric::parse(tag).is_true_metric();
        } catch (const ValidationError&) {
        }
    }
    const std::size_t n = dm.size();
    if (n < 3) {
        report.exhaustive = true;
        return report;
    }
    auto check = [&](Index i, Index j, Index k) {
        ++report.triples_checked;
        const double excess = dm(i, k) - (dm(i, j) + dm(j, k));
        if (excess > report.worst_violation) {
            report.worst_violation = excess;
            report.worst_triple = {i, j, k};
        }
    };
    const double ordered = static_cast<double>(n) * static_cast<double>(n - 1) * static_cast<double>(n - 2);
    if (ordered <= static_cast<double>(samples)) {
        report.exhaustive = true;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                for (Index k = 0; k < n; ++k)
                    if (i != j && j != k && i != k) check(i, j, k);
    } else {
        Rng rng(seed);
        for (std::size_t s = 0; s < samples; ++s) {
            const Index i = rng.below(n);
            Index j = rng.below(n - 1);
            if (j >= i) ++j;
            Index k = rng.below(n);
            while (k == i || k == j) k = rng.below(n);
            check(i, j, k);
        }
    }
    report.pass = report.worst_violation <= kTriangleTolerance;
    return report;
}

} // namespace fission
